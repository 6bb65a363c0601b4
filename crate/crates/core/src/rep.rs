//! Regular representations on ℓ^p of a source fiber, realized as sparse
//! matrices over the enumerated (possibly ball-truncated) fiber.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::AlgebraElement;
use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::groupoid::Arrow;
use crate::linalg::{self, CsrMatrix, SingularEstimate};

/// `M[γ, μ] = w σ(γμ⁻¹, μ) f(γμ⁻¹)` over a basis of `G_x`.
#[derive(Clone, Debug)]
pub struct RepMatrix {
    pub unit: usize,
    pub basis: Vec<Arrow>,
    pub matrix: CsrMatrix,
    /// Truncation radius, `None` for a complete finite fiber.
    pub radius: Option<usize>,
}

/// Exponent of an operator norm, `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("exponent {p} is outside [1, ∞]")));
        }
        Ok(Exponent(p))
    }

    /// The dual exponent `q` with `1/p + 1/q = 1`.
    pub fn dual(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INF
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    pub fn is_exact(self) -> bool {
        self.0 == 1.0 || self.0 == 2.0 || self.0.is_infinite()
    }
}

/// Settings for the random-start lower bounds at general `p`.
#[derive(Clone, Copy, Debug)]
pub struct LowerBoundConfig {
    pub trials: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        LowerBoundConfig { trials: 6, iters: 60, seed: 7 }
    }
}

/// Builds `L_x(f)` on `G_x`, compressed to the word ball of radius `R` on
/// infinite backends.
pub fn assemble_rep(f: &AlgebraElement, x: usize, radius: Option<usize>) -> Result<RepMatrix> {
    let g = f.groupoid();
    let radius = if g.is_finite() { None } else { Some(radius.ok_or(Error::MissingRadius)?) };
    let basis = g.source_fiber(x, radius)?;
    let index: HashMap<&Arrow, u32> = basis.iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
    let sigma = f.algebra().cocycle();
    let trivial = matches!(sigma, Cocycle::Trivial);
    let w = g.fiber_weight();
    let mut by_src: HashMap<usize, Vec<(&Arrow, Complex64)>> = HashMap::new();
    for (a, c) in f.terms() {
        by_src.entry(g.src(a)).or_default().push((a, c * w));
    }
    let triplets: Vec<(u32, u32, Complex64)> = basis
        .par_iter()
        .enumerate()
        .flat_map_iter(|(col, mu)| {
            let mut out = Vec::new();
            if let Some(terms) = by_src.get(&g.tgt(mu)) {
                for &(a, c) in terms {
                    let gamma = g.try_compose(a, mu).expect("composable");
                    if let Some(&row) = index.get(&gamma) {
                        let v = if trivial { c } else { c * sigma.eval(g, a, mu).to_complex() };
                        out.push((row, col as u32, v));
                    }
                }
            }
            out
        })
        .collect();
    let n = basis.len();
    Ok(RepMatrix { unit: x, basis, matrix: CsrMatrix::from_triplets(n, n, triplets), radius })
}

impl RepMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.radius.is_some()
    }

    pub fn two_norm(&self) -> Result<SingularEstimate> {
        linalg::top_singular_value(&self.matrix)
    }

    /// Operator norm for `p ∈ {1, 2, ∞}`.
    pub fn op_norm(&self, p: Exponent) -> Result<f64> {
        if p.0 == 1.0 {
            Ok(self.matrix.max_col_sum())
        } else if p.0.is_infinite() {
            Ok(self.matrix.max_row_sum())
        } else if p.0 == 2.0 {
            Ok(self.two_norm()?.value)
        } else {
            Err(Error::InvalidArgument(format!("exact operator norm needs p ∈ {{1, 2, ∞}}, got {}", p.0)))
        }
    }

    /// Certified lower bound for the `p → p` norm; exact exponents are routed
    /// to [`RepMatrix::op_norm`].
    pub fn op_norm_lower(&self, p: Exponent, cfg: LowerBoundConfig) -> Result<f64> {
        if p.is_exact() {
            return self.op_norm(p);
        }
        Ok(linalg::p_norm_lower(&self.matrix, p.0, cfg.trials, cfg.iters, cfg.seed))
    }

    pub fn index_of(&self, a: &Arrow) -> Option<usize> {
        self.basis.iter().position(|b| b == a)
    }
}

/// `|⟨M(f*)ξ, ζ⟩ − ⟨ξ, M(f)ζ⟩|` on the fiber at `x`.
///
/// On a truncated fiber both vectors must vanish outside the ball of radius
/// `R − diam(supp f)`. The identity pairs `ℓ^p` with `ℓ^q` but does not depend
/// on the exponent, which is only validated.
pub fn duality_residual(
    f: &AlgebraElement,
    x: usize,
    p: Exponent,
    xi: &[Complex64],
    zeta: &[Complex64],
    radius: Option<usize>,
) -> Result<f64> {
    Exponent::new(p.0)?;
    let m = assemble_rep(f, x, radius)?;
    let ms = assemble_rep(&f.involve(), x, radius)?;
    if xi.len() != m.dim() || zeta.len() != m.dim() {
        return Err(Error::InvalidArgument(format!(
            "vectors must have length {}, got {} and {}",
            m.dim(),
            xi.len(),
            zeta.len()
        )));
    }
    if let Some(r) = m.radius {
        let g = f.groupoid();
        let required = f.word_diameter().unwrap_or(0);
        let reach = m
            .basis
            .iter()
            .zip(xi.iter().zip(zeta))
            .filter(|(_, (a, b))| a.norm() != 0.0 || b.norm() != 0.0)
            .map(|(arrow, _)| g.word_length(arrow).unwrap_or(0))
            .max()
            .unwrap_or(0);
        let margin = r - reach.min(r);
        if margin < required {
            return Err(Error::BoundaryViolation { margin, required });
        }
    }
    let lhs = linalg::pairing(&ms.matrix.matvec(xi), zeta);
    let rhs = linalg::pairing(xi, &m.matrix.matvec(zeta));
    Ok((lhs - rhs).norm())
}

/// Per-unit data behind a ♯-norm estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitNorms {
    pub unit: usize,
    pub lower_p: f64,
    pub lower_q: f64,
    pub two: f64,
}

/// Bounds for `‖f‖_{♯,p} = max(‖f‖_{r,p}, ‖f‖_{r,q})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpNorm {
    pub p: f64,
    pub lower: f64,
    /// Certified upper bound for the untruncated norm.
    pub upper: f64,
    pub i_norm: f64,
    /// `θ` of the interpolation bound, when `p ≠ 2` is strictly between 1 and ∞.
    pub theta: Option<f64>,
    /// `‖f‖_I^{1−θ} s^θ` where `s` is the largest computed fiber 2-norm. For
    /// truncated fibers this bounds the compressions, not `f` itself.
    pub interpolation: Option<f64>,
    pub two_norm: f64,
    pub radius: Option<usize>,
    pub units: Vec<UnitNorms>,
}

/// `θ = (2p − 2)/p` for `1 < p < 2`, applied to `min(p, q)` otherwise.
pub fn interpolation_theta(p: f64) -> Option<f64> {
    if !(p > 1.0 && p.is_finite()) || p == 2.0 {
        return None;
    }
    let p = if p > 2.0 { p / (p - 1.0) } else { p };
    Some((2.0 * p - 2.0) / p)
}

pub fn sharp_norm(
    f: &AlgebraElement,
    p: Exponent,
    radius: Option<usize>,
    cfg: LowerBoundConfig,
) -> Result<SharpNorm> {
    let g = f.groupoid();
    let q = p.dual();
    let i_norm = f.i_norm();
    let units: Vec<UnitNorms> = (0..g.num_units())
        .map(|x| {
            let m = assemble_rep(f, x, radius)?;
            let two = m.op_norm(Exponent::TWO)?;
            let lower_p = if p.0 == 2.0 { two } else { m.op_norm_lower(p, cfg)? };
            let lower_q = if q.0 == 2.0 { two } else { m.op_norm_lower(q, cfg)? };
            Ok(UnitNorms { unit: x, lower_p, lower_q, two })
        })
        .collect::<Result<_>>()?;
    let lower = units.iter().map(|u| u.lower_p.max(u.lower_q)).fold(0.0, f64::max);
    let two_norm = units.iter().map(|u| u.two).fold(0.0, f64::max);
    let truncated = !g.is_finite();
    let theta = interpolation_theta(p.0);
    let interpolation = theta.map(|t| i_norm.powf(1.0 - t) * two_norm.powf(t));
    let mut upper = i_norm;
    if !truncated {
        if p.0 == 2.0 {
            upper = upper.min(two_norm);
        }
        if let Some(b) = interpolation {
            upper = upper.min(b);
        }
    }
    // the computed lower bounds may exceed an exact value by rounding only
    let upper = upper.max(lower);
    Ok(SharpNorm {
        p: p.0,
        lower,
        upper,
        i_norm,
        theta,
        interpolation,
        two_norm,
        radius: if truncated { radius } else { None },
        units,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::cocycle::{extend_group_cocycle, GroupCocycle};
    use crate::group::{FiniteGroup, GroupElem, GroupSpec};
    use crate::groupoid::{Groupoid, TransformationGroupoid};
    use crate::phase::Phase;
    use std::sync::Arc;

    fn z2_sign() -> Arc<Algebra> {
        let g = Groupoid::Action(
            TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::finite(FiniteGroup::cyclic(2)))
                .unwrap(),
        );
        let s = GroupCocycle::table(
            &FiniteGroup::cyclic(2),
            vec![vec![Phase::ONE, Phase::ONE], vec![Phase::ONE, Phase::turn(1, 2)]],
        )
        .unwrap();
        let s = extend_group_cocycle(&s, &g).unwrap();
        Algebra::new(g, s)
    }

    #[test]
    fn sign_generator_matrix() {
        let alg = z2_sign();
        let f = AlgebraElement::delta(&alg, Arrow::action(0, GroupElem::Finite(1))).unwrap();
        let m = assemble_rep(&f, 0, None).unwrap();
        assert_eq!(m.matrix.get(0, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(m.matrix.get(1, 0), Complex64::new(1.0, 0.0));
        for p in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
            assert!((m.op_norm(p).unwrap() - 1.0).abs() < 1e-12);
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let r = duality_residual(&f, 0, Exponent(1.5), &[one, zero], &[zero, one], None).unwrap();
        assert!(r < 1e-15);
    }

    #[test]
    fn unit_sharp_norm() {
        let alg = z2_sign();
        let u = AlgebraElement::unit_element(&alg);
        let s = sharp_norm(&u, Exponent(4.0 / 3.0), None, LowerBoundConfig::default()).unwrap();
        assert!((s.lower - 1.0).abs() < 1e-12 && (s.upper - 1.0).abs() < 1e-12);
        assert!((s.theta.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn theta_is_symmetric_in_dual_exponents() {
        assert_eq!(interpolation_theta(1.5), interpolation_theta(3.0));
        assert!((interpolation_theta(9.0 / 5.0).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(interpolation_theta(2.0), None);
    }
}
