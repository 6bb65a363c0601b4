//! Derived objects: the cyclic untwisting, the generalized L¹-algebra, the
//! isotropy lift and the free-group example.

pub mod counterexample;
pub mod genl1;
pub mod lift;
pub mod ztwist;
