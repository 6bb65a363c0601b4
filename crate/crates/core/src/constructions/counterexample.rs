//! The free-group element `f̂ = a₀δ_t + a₁δ_{zt} + a₂δ_{z²t}` on `F₂ = ⟨z, t⟩`,
//! whose ℓ¹ powers all have norm 1 while its reduced norm is
//! `sup_{x ∈ T} |a₀ + a₁x + a₂x²| < 1`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement, PowerEntry};
use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::group::{GroupElem, GroupSpec, Word};
use crate::groupoid::{Arrow, Groupoid, TransformationGroupoid};
use crate::linalg::SvdMethod;
use crate::rep::assemble_rep;
use crate::spectral::Verdict;

/// Number of circle samples for the polynomial supremum.
pub const CIRCLE_SAMPLES: usize = 1 << 16;
pub const MODULUS_TOL: f64 = 1e-12;
pub const CONTRACTION_MARGIN: f64 = 1e-6;
pub const POWER_TOL: f64 = 1e-12;

pub const VERDICT: &str = "spectral radius gap: r_l1 = 1 > reduced bound";

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub coefficients: [Complex64; 3],
    /// Largest sampled value of `|a₀ + a₁x + a₂x²|` on the circle.
    pub sup_t: f64,
    /// `sup_t` plus the sampling error bound; an upper bound for the reduced norm.
    pub sup_t_upper: f64,
    pub powers: Vec<PowerEntry>,
    pub radius: usize,
    pub reduced_lower: f64,
    pub reduced_method: SvdMethod,
    pub l1_best: f64,
    pub verdict: Verdict,
}

/// The one-point transformation groupoid of `F₂ = ⟨z, t⟩` with trivial cocycle.
pub fn free_algebra() -> Arc<Algebra> {
    let g = TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::free(&["z", "t"]))
        .expect("trivial action");
    Algebra::new(Groupoid::Action(g), Cocycle::Trivial)
}

/// `max_k |p(e^{2πik/N})|` and a certified upper bound for `sup_T |p|`.
pub fn circle_sup(a: &[Complex64; 3]) -> (f64, f64) {
    let sup = (0..CIRCLE_SAMPLES)
        .map(|k| {
            let x = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / CIRCLE_SAMPLES as f64);
            (a[0] + a[1] * x + a[2] * x * x).norm()
        })
        .fold(0.0, f64::max);
    // |p'| ≤ |a₁| + 2|a₂| and every point is within π/N of a sample
    let lip = a[1].norm() + 2.0 * a[2].norm();
    (sup, sup + lip * std::f64::consts::PI / CIRCLE_SAMPLES as f64)
}

pub fn free_element(alg: &Arc<Algebra>, a: &[Complex64; 3]) -> Result<AlgebraElement> {
    let t = Word::generator(1, false);
    let terms = (0..3).map(|k| {
        let zk = Word::from_letters(&vec![1i8; k]);
        (Arrow::action(0, GroupElem::Free(zk.mul(&t))), a[k])
    });
    AlgebraElement::new(alg, terms)
}

pub fn free_counterexample(
    a: [Complex64; 3],
    max_n: usize,
    radius: usize,
    cap: usize,
) -> Result<CounterexampleReport> {
    for c in &a {
        if (c.norm() - 1.0 / 3.0).abs() > MODULUS_TOL {
            return Err(Error::ModulusViolation(c.norm()));
        }
    }
    let (sup_t, sup_t_upper) = circle_sup(&a);
    if sup_t >= 1.0 - CONTRACTION_MARGIN {
        return Err(Error::NotContractivePolynomial(sup_t));
    }
    let alg = free_algebra();
    let f = free_element(&alg, &a)?;
    let powers = f.power_seq(max_n, cap)?;
    let est = assemble_rep(&f, 0, Some(radius))?.two_norm()?;
    let l1_best = powers.iter().map(|e| e.root).fold(f64::INFINITY, f64::min);
    let worst = powers.iter().map(|e| (e.norm - 1.0).abs()).fold(0.0, f64::max);
    let reduced_upper = sup_t_upper.min(1.0);
    let passed = worst <= POWER_TOL && reduced_upper < 1.0 && est.value <= reduced_upper;
    Ok(CounterexampleReport {
        coefficients: a,
        sup_t,
        sup_t_upper,
        powers,
        radius,
        reduced_lower: est.value,
        reduced_method: est.method,
        l1_best,
        verdict: Verdict { name: VERDICT.into(), passed, value: worst, tolerance: POWER_TOL },
    })
}
