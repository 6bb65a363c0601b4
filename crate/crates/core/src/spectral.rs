//! Spectra and spectral radii in ℓ¹ and in the reduced C*-completion.

use std::collections::HashMap;

use faer::Mat;
use num_complex::Complex64;

use crate::algebra::{AlgebraElement, PowerEntry};
use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::groupoid::Arrow;
use crate::linalg::{self, SvdMethod};
use crate::rep::{assemble_rep, sharp_norm, Exponent, LowerBoundConfig};

/// Margin separating a certified gap from truncation slack.
pub const GAP_MARGIN: f64 = 0.05;
/// Tolerance on `f - f*` for an element to count as self-adjoint.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;
/// Two consecutive radius bounds closer than this are flagged as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// A bound sequence whose spread is below this is treated as constant.
pub const CONSTANT_TOL: f64 = 1e-12;
/// Slack allowed in the interpolation inequality.
pub const INTERPOLATION_TOL: f64 = 1e-9;

/// Matrix of `h ↦ f ⋆ h` on a finite algebra, in the order of `arrows()`.
pub fn left_multiplication(f: &AlgebraElement) -> Result<(Mat<Complex64>, Vec<Arrow>)> {
    let g = f.groupoid();
    let arrows = g.arrows()?;
    let index: HashMap<&Arrow, usize> = arrows.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let sigma = f.algebra().cocycle();
    let w = g.fiber_weight();
    let n = arrows.len();
    let mut m = Mat::<Complex64>::zeros(n, n);
    for (a, c) in f.terms() {
        for (j, b) in arrows.iter().enumerate() {
            if let Some(ab) = g.try_compose(a, b) {
                let s = match sigma {
                    Cocycle::Trivial => Complex64::new(1.0, 0.0),
                    _ => sigma.eval(g, a, b).to_complex(),
                };
                m[(index[&ab], j)] += c * s * w;
            }
        }
    }
    Ok((m, arrows))
}

/// `Spec_{ℓ¹(G,σ)}(f)` for a finite groupoid, sorted by (Re, Im).
pub fn spectrum_l1_finite(f: &AlgebraElement) -> Result<Vec<Complex64>> {
    if !f.groupoid().is_finite() {
        return Err(Error::InfiniteBackend);
    }
    let (m, _) = left_multiplication(f)?;
    let mut ev = linalg::eigenvalues(&m)?;
    linalg::sort_spectrum(&mut ev);
    Ok(ev)
}

/// Union over units of the spectra of `L_x(f)`, sorted by (Re, Im).
pub fn spectrum_reduced_finite(f: &AlgebraElement) -> Result<Vec<Complex64>> {
    let g = f.groupoid();
    if !g.is_finite() {
        return Err(Error::InfiniteBackend);
    }
    let mut all = Vec::new();
    for x in 0..g.num_units() {
        let m = assemble_rep(f, x, None)?;
        all.extend(linalg::eigenvalues(&m.matrix.to_dense())?);
    }
    linalg::sort_spectrum(&mut all);
    Ok(all)
}

/// Repeated squaring past the linear chain stops once `|supp|²` exceeds this.
pub const DYADIC_WORK: usize = 10_000_000;
/// Largest doubling exponent tried, so finite supports terminate.
pub const MAX_DOUBLINGS: u32 = 20;

/// Upper bounds `‖fⁿ‖_I^{1/n}` for the ℓ¹ spectral radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusBounds {
    /// `n = 1..=max_n` by linear chaining.
    pub powers: Vec<PowerEntry>,
    /// `n = 2^k > max_n` by repeated squaring, while the work budget allows.
    pub dyadic: Vec<PowerEntry>,
    pub best: f64,
    pub converged: bool,
    /// The spread of all bounds is below [`CONSTANT_TOL`].
    pub constant: bool,
    pub cap: usize,
}

/// `‖f^(2^k)‖_I` for `2^k > max_n`. Each square is rescaled to unit norm so
/// large powers do not overflow; `norm` may still be infinite.
fn dyadic_tail(f: &AlgebraElement, max_n: usize, cap: usize) -> Result<Vec<PowerEntry>> {
    let mut out = Vec::new();
    let first = f.i_norm();
    if first == 0.0 {
        return Ok(out);
    }
    let mut p = f.scale(Complex64::new(1.0 / first, 0.0));
    let mut log_norm = first.ln();
    let mut n = 1usize;
    for _ in 0..MAX_DOUBLINGS {
        if p.len().saturating_mul(p.len()) > DYADIC_WORK {
            break;
        }
        p = p.convolve(&p)?;
        n *= 2;
        if p.len() > cap {
            break;
        }
        let m = p.i_norm();
        if m == 0.0 {
            break;
        }
        log_norm = 2.0 * log_norm + m.ln();
        p = p.scale(Complex64::new(1.0 / m, 0.0));
        if n > max_n {
            out.push(PowerEntry { n, norm: log_norm.exp(), root: (log_norm / n as f64).exp(), terms: p.len() });
        }
    }
    Ok(out)
}

pub fn l1_radius_upper(f: &AlgebraElement, max_n: usize, cap: usize) -> Result<RadiusBounds> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("at least one power is required".into()));
    }
    let powers = f.power_seq(max_n, cap)?;
    let dyadic = dyadic_tail(f, max_n, cap)?;
    let roots: Vec<f64> = powers.iter().chain(&dyadic).map(|e| e.root).collect();
    let best = roots.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let converged = roots.len() >= 2 && (roots[roots.len() - 1] - roots[roots.len() - 2]).abs() < CONVERGENCE_TOL;
    Ok(RadiusBounds { powers, dyadic, best, converged, constant: hi - best <= CONSTANT_TOL, cap })
}

/// Bounds for `‖f‖_{r,2} = sup_x ‖L_x(f)‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBounds {
    pub lower: f64,
    pub upper: f64,
    /// Both slots hold the exact value (finite backends).
    pub exact: bool,
    pub radius: Option<usize>,
    /// Compression norms at `R - 2` and `R`, when truncated.
    pub sequence: Vec<(usize, f64)>,
    /// Limit estimate from the compression sequence, clipped to `[lower, upper]`.
    pub extrapolated: f64,
    pub method: SvdMethod,
}

fn compression_norm(f: &AlgebraElement, radius: usize) -> Result<(f64, SvdMethod)> {
    let g = f.groupoid();
    let mut best = 0.0f64;
    let mut method = SvdMethod::Dense;
    for x in 0..g.num_units() {
        let est = assemble_rep(f, x, Some(radius))?.two_norm()?;
        if est.value >= best {
            best = est.value;
            method = est.method;
        }
    }
    Ok((best, method))
}

/// Extrapolates compression norms `λ_R` assuming `λ_R ≈ λ_∞ − c/(R+2)²`.
pub fn extrapolate(r_prev: usize, l_prev: f64, r: usize, l: f64) -> f64 {
    let h = |r: usize| 1.0 / ((r + 2) as f64).powi(2);
    l + (l - l_prev) * h(r) / (h(r_prev) - h(r))
}

pub fn reduced_norm_bounds(f: &AlgebraElement, radius: Option<usize>) -> Result<ReducedBounds> {
    let g = f.groupoid();
    if g.is_finite() {
        let mut best = 0.0f64;
        for x in 0..g.num_units() {
            best = best.max(assemble_rep(f, x, None)?.op_norm(Exponent::TWO)?);
        }
        return Ok(ReducedBounds {
            lower: best,
            upper: best,
            exact: true,
            radius: None,
            sequence: Vec::new(),
            extrapolated: best,
            method: SvdMethod::Dense,
        });
    }
    let r = radius.ok_or(Error::MissingRadius)?;
    let required = f.word_diameter().unwrap_or(0) + 2;
    if r < required {
        return Err(Error::RadiusTooSmall { radius: r, required });
    }
    let upper = f.i_norm();
    let (lower, method) = compression_norm(f, r)?;
    let (prev, _) = compression_norm(f, r - 2)?;
    let extrapolated = extrapolate(r - 2, prev, r, lower).clamp(lower, upper.max(lower));
    Ok(ReducedBounds {
        lower,
        upper: upper.max(lower),
        exact: false,
        radius: Some(r),
        sequence: vec![(r - 2, prev), (r, lower)],
        extrapolated,
        method,
    })
}

fn require_self_adjoint(f: &AlgebraElement) -> Result<()> {
    let d = f.self_adjoint_defect();
    if d > SELF_ADJOINT_TOL * f.sup_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint(d));
    }
    Ok(())
}

/// A named pass/fail outcome with the tolerance it was judged against.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianCheck {
    pub spectrum: Vec<Complex64>,
    pub max_imag: f64,
    pub verdict: Verdict,
}

/// Whether the ℓ¹ spectrum of a self-adjoint element is real.
pub fn hermitian_check(f: &AlgebraElement, tol: f64) -> Result<HermitianCheck> {
    if !f.groupoid().is_finite() {
        return Err(Error::InfiniteBackend);
    }
    require_self_adjoint(f)?;
    let spectrum = spectrum_l1_finite(f)?;
    let max_imag = spectrum.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(HermitianCheck {
        spectrum,
        max_imag,
        verdict: Verdict { name: "real spectrum".into(), passed: max_imag <= tol, value: max_imag, tolerance: tol },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationCheck {
    pub p: f64,
    pub theta: f64,
    pub lhs_lower: f64,
    pub i_norm: f64,
    pub two_norm: f64,
    pub rhs: f64,
    pub slack: f64,
    pub radius: Option<usize>,
    pub verdict: Verdict,
}

/// `‖f‖_{♯,p} ≤ ‖f‖_I^{1−θ} ‖f‖_{r,2}^θ` with `θ = (2p−2)/p`, `1 < p < 2`.
///
/// On truncated fibers both sides refer to the same compressions.
pub fn interpolation_check(
    f: &AlgebraElement,
    p: f64,
    radius: Option<usize>,
    cfg: LowerBoundConfig,
) -> Result<InterpolationCheck> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidArgument(format!("interpolation needs 1 < p < 2, got {p}")));
    }
    let s = sharp_norm(f, Exponent(p), radius, cfg)?;
    let theta = (2.0 * p - 2.0) / p;
    let rhs = s.i_norm.powf(1.0 - theta) * s.two_norm.powf(theta);
    let passed = s.lower <= rhs + INTERPOLATION_TOL;
    Ok(InterpolationCheck {
        p,
        theta,
        lhs_lower: s.lower,
        i_norm: s.i_norm,
        two_norm: s.two_norm,
        rhs,
        slack: rhs - s.lower,
        radius: s.radius,
        verdict: Verdict { name: "interpolation".into(), passed, value: rhs - s.lower, tolerance: INTERPOLATION_TOL },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapVerdict {
    GapCertified,
    ConsistentWithEquality,
    Inconclusive,
}

impl GapVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            GapVerdict::GapCertified => "gap certified",
            GapVerdict::ConsistentWithEquality => "consistent with equality",
            GapVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Comparison of the ℓ¹ spectral radius with the reduced norm.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub spectrum_l1: Option<Vec<Complex64>>,
    pub spectrum_reduced: Option<Vec<Complex64>>,
    pub l1: RadiusBounds,
    pub reduced: ReducedBounds,
    /// `[reduced lower bound, best ℓ¹ upper bound]`.
    pub interval: (f64, f64),
    pub gap_estimate: f64,
    pub verdict: GapVerdict,
    pub verdicts: Vec<Verdict>,
}

pub fn gap_report(f: &AlgebraElement, max_n: usize, radius: Option<usize>, cap: usize) -> Result<SpectralReport> {
    require_self_adjoint(f)?;
    let finite = f.groupoid().is_finite();
    let l1 = l1_radius_upper(f, max_n, cap)?;
    let reduced = reduced_norm_bounds(f, radius)?;
    let (spectrum_l1, spectrum_reduced) = if finite {
        (Some(spectrum_l1_finite(f)?), Some(spectrum_reduced_finite(f)?))
    } else {
        (None, None)
    };
    let gap_estimate = l1.best - reduced.extrapolated;
    let width = l1.best - reduced.lower;
    let gap = l1.constant && gap_estimate > GAP_MARGIN;
    let equal = width < GAP_MARGIN;
    let verdict = if gap {
        GapVerdict::GapCertified
    } else if equal {
        GapVerdict::ConsistentWithEquality
    } else {
        GapVerdict::Inconclusive
    };
    let verdicts = vec![
        Verdict { name: "gap certified".into(), passed: gap, value: gap_estimate, tolerance: GAP_MARGIN },
        Verdict { name: "consistent with equality".into(), passed: equal, value: width, tolerance: GAP_MARGIN },
        Verdict {
            name: "l1 bounds dominate reduced bound".into(),
            passed: l1.best + 1e-9 >= reduced.lower,
            value: l1.best - reduced.lower,
            tolerance: 1e-9,
        },
    ];
    Ok(SpectralReport {
        spectrum_l1,
        spectrum_reduced,
        interval: (reduced.lower, l1.best),
        l1,
        reduced,
        gap_estimate,
        verdict,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, DEFAULT_TERM_CAP};
    use crate::group::{FiniteGroup, GroupElem, GroupSpec};
    use crate::groupoid::{Groupoid, TransformationGroupoid};

    fn z2() -> std::sync::Arc<Algebra> {
        let g = Groupoid::Action(
            TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::finite(FiniteGroup::cyclic(2)))
                .unwrap(),
        );
        Algebra::new(g, Cocycle::Trivial)
    }

    #[test]
    fn group_algebra_characters() {
        let alg = z2();
        let e = Arrow::action(0, GroupElem::Finite(0));
        let g = Arrow::action(0, GroupElem::Finite(1));
        let f = AlgebraElement::delta(&alg, g.clone()).unwrap();
        let s = spectrum_l1_finite(&f).unwrap();
        assert!(linalg::multiset_distance(&s, &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]) < 1e-12);
        let h = AlgebraElement::new(&alg, [(g, Complex64::new(1.0, 0.0)), (e, Complex64::new(-1.0, 0.0))]).unwrap();
        let s = spectrum_l1_finite(&h).unwrap();
        assert!(linalg::multiset_distance(&s, &[Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0)]) < 1e-12);
        assert!(linalg::hausdorff(&s, &spectrum_reduced_finite(&h).unwrap()) < 1e-12);
    }

    #[test]
    fn zero_element_report() {
        let alg = z2();
        let z = AlgebraElement::zero(&alg);
        let r = gap_report(&z, 3, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(r.interval, (0.0, 0.0));
        assert_eq!(r.verdict, GapVerdict::ConsistentWithEquality);
    }

    #[test]
    fn extrapolation_of_a_quadratic_approach() {
        let lam = |r: usize| 3.0 - 5.0 / ((r + 2) as f64).powi(2);
        assert!((extrapolate(8, lam(8), 10, lam(10)) - 3.0).abs() < 1e-12);
    }
}
