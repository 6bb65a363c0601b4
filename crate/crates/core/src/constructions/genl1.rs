//! The generalized L¹-algebra of a finite group acting on a finite space, and
//! the map `Φ` onto the transformation groupoid algebra.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement};
use crate::cocycle::{Cocycle, GroupCocycle};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElem, GroupSpec};
use crate::groupoid::{Arrow, Groupoid, TransformationGroupoid};

/// A finite group `Γ`, a finite space `X` with a left action, and `σ_Γ`.
#[derive(Debug)]
pub struct GenL1Context {
    group: Arc<FiniteGroup>,
    points: Vec<String>,
    /// `perms[γ][x] = γ·x`
    perms: Vec<Vec<usize>>,
    sigma: GroupCocycle,
}

impl GenL1Context {
    pub fn new(groupoid: &TransformationGroupoid, sigma: GroupCocycle) -> Result<Arc<Self>> {
        let GroupSpec::Finite(group) = groupoid.group() else {
            return Err(Error::InfiniteBackend);
        };
        sigma.check_group(groupoid.group())?;
        Ok(Arc::new(GenL1Context {
            group: group.clone(),
            points: groupoid.points().to_vec(),
            perms: groupoid.permutations(),
            sigma,
        }))
    }

    /// Takes the data of a transformation-groupoid algebra whose cocycle is
    /// pulled back from the group.
    pub fn from_algebra(alg: &Algebra) -> Result<Arc<Self>> {
        let Groupoid::Action(t) = alg.groupoid() else {
            return Err(Error::ContextMismatch("not a transformation groupoid".into()));
        };
        let sigma = match alg.cocycle() {
            Cocycle::Trivial => GroupCocycle::Trivial,
            Cocycle::Group(gc) => gc.clone(),
            _ => return Err(Error::ContextMismatch("cocycle is not pulled back from the group".into())),
        };
        Self::new(t, sigma)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    fn sigma(&self, a: usize, b: usize) -> Complex64 {
        self.sigma.eval(&GroupElem::Finite(a as u16), &GroupElem::Finite(b as u16)).to_complex()
    }

    fn matches(&self, alg: &Algebra) -> bool {
        let Groupoid::Action(t) = alg.groupoid() else { return false };
        let same_group = matches!(t.group(), GroupSpec::Finite(g) if g.table() == self.group.table());
        let same_sigma = match (alg.cocycle(), &self.sigma) {
            (Cocycle::Trivial, s) => s.is_trivial(),
            (Cocycle::Group(a), b) => a == b,
            _ => false,
        };
        same_group && same_sigma && t.points().len() == self.points.len() && t.permutations() == self.perms
    }
}

/// A function `Γ → C(X)`, stored densely as `coeffs[γ][x]`.
#[derive(Clone, Debug)]
pub struct GenL1Element {
    ctx: Arc<GenL1Context>,
    coeffs: Vec<Vec<Complex64>>,
}

impl GenL1Element {
    pub fn new(ctx: &Arc<GenL1Context>, coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        let (n, m) = (ctx.group.order(), ctx.points.len());
        if coeffs.len() != n || coeffs.iter().any(|r| r.len() != m) {
            return Err(Error::ContextMismatch(format!("coefficients must be {n}×{m}")));
        }
        Ok(GenL1Element { ctx: ctx.clone(), coeffs })
    }

    pub fn zero(ctx: &Arc<GenL1Context>) -> Self {
        let coeffs = vec![vec![Complex64::new(0.0, 0.0); ctx.points.len()]; ctx.group.order()];
        GenL1Element { ctx: ctx.clone(), coeffs }
    }

    /// `δ_γ ⊗ φ`.
    pub fn point_mass(ctx: &Arc<GenL1Context>, gamma: u16, phi: &[Complex64]) -> Result<Self> {
        let mut f = Self::zero(ctx);
        if phi.len() != ctx.points.len() || gamma as usize >= ctx.group.order() {
            return Err(Error::ContextMismatch("point mass does not fit the context".into()));
        }
        f.coeffs[gamma as usize] = phi.to_vec();
        Ok(f)
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn context(&self) -> &Arc<GenL1Context> {
        &self.ctx
    }

    fn same_context(&self, other: &GenL1Element) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch("elements belong to different contexts".into()))
        }
    }

    /// `(f ⋆ h)(γ)(x) = Σ_μ σ(γμ⁻¹, μ) f(γμ⁻¹)(μ·x) h(μ)(x)`.
    pub fn convolve(&self, h: &GenL1Element) -> Result<GenL1Element> {
        self.same_context(h)?;
        let ctx = &self.ctx;
        let g = &ctx.group;
        let mut out = Self::zero(ctx);
        for gamma in 0..g.order() as u16 {
            for mu in 0..g.order() as u16 {
                let a = g.mul(gamma, g.inv(mu));
                let s = ctx.sigma(a as usize, mu as usize);
                for x in 0..ctx.points.len() {
                    let mx = ctx.perms[mu as usize][x];
                    out.coeffs[gamma as usize][x] += s * self.coeffs[a as usize][mx] * h.coeffs[mu as usize][x];
                }
            }
        }
        Ok(out)
    }

    /// `f*(γ)(x) = conj(σ(γ, γ⁻¹) f(γ⁻¹)(γ·x))`.
    pub fn involve(&self) -> GenL1Element {
        let ctx = &self.ctx;
        let g = &ctx.group;
        let mut out = Self::zero(ctx);
        for gamma in 0..g.order() as u16 {
            let gi = g.inv(gamma);
            let s = ctx.sigma(gamma as usize, gi as usize);
            for x in 0..ctx.points.len() {
                let gx = ctx.perms[gamma as usize][x];
                out.coeffs[gamma as usize][x] = (s * self.coeffs[gi as usize][gx]).conj();
            }
        }
        out
    }

    /// `Σ_γ max_x |f(γ)(x)|`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|r| r.iter().map(|z| z.norm()).fold(0.0, f64::max)).sum()
    }

    pub fn sub(&self, other: &GenL1Element) -> Result<GenL1Element> {
        self.same_context(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(GenL1Element { ctx: self.ctx.clone(), coeffs })
    }
}

/// `Φ(f)(x, γ) = f(γ)(x)`.
pub fn phi_map(f: &GenL1Element, target: &Arc<Algebra>) -> Result<AlgebraElement> {
    if !f.ctx.matches(target) {
        return Err(Error::ContextMismatch("target algebra is not built from this context".into()));
    }
    let terms = f.coeffs.iter().enumerate().flat_map(|(gamma, row)| {
        row.iter().enumerate().map(move |(x, c)| (Arrow::action(x, GroupElem::Finite(gamma as u16)), *c))
    });
    AlgebraElement::new(target, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::extend_group_cocycle;
    use crate::phase::Phase;

    fn setup() -> (Arc<GenL1Context>, Arc<Algebra>) {
        let t = TransformationGroupoid::new(
            vec!["p".into(), "q".into()],
            GroupSpec::finite(FiniteGroup::cyclic(2)),
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let s = GroupCocycle::table(
            &FiniteGroup::cyclic(2),
            vec![vec![Phase::ONE, Phase::ONE], vec![Phase::ONE, Phase::turn(1, 2)]],
        )
        .unwrap();
        let ctx = GenL1Context::new(&t, s.clone()).unwrap();
        let g = Groupoid::Action(t);
        let sigma = extend_group_cocycle(&s, &g).unwrap();
        (ctx, Algebra::new(g, sigma))
    }

    #[test]
    fn point_masses_multiply_by_the_cocycle() {
        let (ctx, _) = setup();
        let one = vec![Complex64::new(1.0, 0.0); 2];
        let dg = GenL1Element::point_mass(&ctx, 1, &one).unwrap();
        let sq = dg.convolve(&dg).unwrap();
        assert_eq!(sq.coeffs()[0], vec![Complex64::new(-1.0, 0.0); 2]);
        assert_eq!(dg.norm(), 1.0);
    }

    #[test]
    fn phi_respects_products() {
        let (ctx, alg) = setup();
        let f = GenL1Element::new(
            &ctx,
            vec![
                vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)],
                vec![Complex64::new(0.0, -1.0), Complex64::new(2.0, 1.0)],
            ],
        )
        .unwrap();
        let lhs = phi_map(&f.convolve(&f.involve()).unwrap(), &alg).unwrap();
        let pf = phi_map(&f, &alg).unwrap();
        let rhs = pf.convolve(&pf.involve()).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
        assert!(pf.i_norm() <= f.norm() + 1e-12);
    }
}
