//! Twisted convolution algebras of étale groupoids with finitely many units.
//!
//! The crate covers finite groupoids and transformation groupoids of finite,
//! free and free abelian groups acting on finite sets, 2-cocycles on them,
//! the twisted convolution algebra `C_c(G, σ)`, its regular representations
//! on ℓ^p of the source fibers, and spectral diagnostics comparing the ℓ¹
//! spectral radius with the reduced C*-norm.

pub mod algebra;
pub mod cocycle;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod groupoid;
pub mod linalg;
pub mod phase;
pub mod rep;
pub mod spectral;

pub use algebra::{Algebra, AlgebraElement};
pub use cocycle::{Cocycle, GroupCocycle};
pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupElem, GroupSpec};
pub use groupoid::{Arrow, Groupoid};
pub use phase::Phase;
