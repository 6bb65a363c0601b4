//! The untwisting `G_σ = G × ℤ/n` of a groupoid whose cocycle takes values in
//! the n-th roots of unity, the embedding `j`, and the group `Γ_σ`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Algebra, AlgebraElement};
use crate::cocycle::{Cocycle, GroupCocycle};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElem, GroupSpec};
use crate::groupoid::{Arrow, Groupoid, TransformationGroupoid};
use crate::phase::{turn_to_complex, Phase};

use num_rational::Ratio;

/// Arrows `(γ, k)` with `k ∈ ℤ/n` standing for `exp(2πi k/n)`, and product
/// `(γ₁,k₁)(γ₂,k₂) = (γ₁γ₂, k₁ + k₂ − s(γ₁,γ₂))` where `σ = exp(2πi s/n)`.
#[derive(Clone, Debug)]
pub struct ZTwistGroupoid {
    base: Arc<Algebra>,
    n: u32,
}

impl ZTwistGroupoid {
    pub fn base(&self) -> &Arc<Algebra> {
        &self.base
    }

    pub fn base_groupoid(&self) -> &Groupoid {
        self.base.groupoid()
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    fn residue(&self, a: &Arrow, b: &Arrow) -> u32 {
        let g = self.base.groupoid();
        self.base
            .cocycle()
            .eval(g, a, b)
            .residue_mod(self.n)
            .expect("cocycle values were checked at construction")
    }

    pub(crate) fn compose(&self, a: &Arrow, b: &Arrow) -> Arrow {
        let (Arrow::Twist { base: ga, turn: ka }, Arrow::Twist { base: gb, turn: kb }) = (a, b) else {
            panic!("non-twist arrow in a twist groupoid")
        };
        let g = self.base.groupoid();
        let prod = g.try_compose(ga, gb).expect("composable");
        let s = self.residue(ga, gb);
        Arrow::Twist { base: Box::new(prod), turn: (ka + kb + self.n - s) % self.n }
    }

    pub(crate) fn invert(&self, a: &Arrow) -> Arrow {
        let Arrow::Twist { base, turn } = a else { panic!("non-twist arrow in a twist groupoid") };
        let g = self.base.groupoid();
        let inv = g.invert(base);
        let s = self.residue(base, &inv);
        Arrow::Twist { base: Box::new(inv), turn: (self.n - turn + s) % self.n }
    }
}

fn check_root(p: Phase, n: u32) -> Result<()> {
    p.residue_mod(n).map(|_| ()).ok_or_else(|| Error::NotRootOfUnity(p.to_string()))
}

/// Builds the algebra of `G_σ` (with trivial cocycle) over a twisted algebra
/// whose cocycle values are n-th roots of unity.
pub fn build_z_twist(base: &Arc<Algebra>, n: u32) -> Result<Arc<Algebra>> {
    if n == 0 {
        return Err(Error::InvalidArgument("fiber order must be positive".into()));
    }
    let g = base.groupoid();
    let sigma = base.cocycle();
    match sigma {
        Cocycle::Trivial => {}
        Cocycle::Group(GroupCocycle::Bilinear(theta)) => {
            for r in theta.iter().flatten() {
                check_root(Phase::from_ratio(*r), n)?;
            }
        }
        _ if g.is_finite() => {
            let arrows = g.arrows()?;
            for a in &arrows {
                for b in arrows.iter().filter(|b| g.tgt(b) == g.src(a)) {
                    check_root(sigma.eval(g, a, b), n)?;
                }
            }
        }
        _ => return Err(Error::InfiniteBackend),
    }
    let tw = ZTwistGroupoid { base: base.clone(), n };
    Ok(Algebra::new(Groupoid::Twist(tw), Cocycle::Trivial))
}

fn twist_of(twisted: &Arc<Algebra>) -> Result<&ZTwistGroupoid> {
    match twisted.groupoid() {
        Groupoid::Twist(z) => Ok(z),
        _ => Err(Error::InvalidArgument("target algebra is not a cyclic twist".into())),
    }
}

/// `j(f)(γ, k) = exp(2πi k/n) f(γ)`.
pub fn embed_j(f: &AlgebraElement, twisted: &Arc<Algebra>) -> Result<AlgebraElement> {
    let z = twist_of(twisted)?;
    if !Arc::ptr_eq(z.base(), f.algebra()) {
        return Err(Error::ParentMismatch);
    }
    let n = z.order();
    let chars: Vec<Complex64> = (0..n).map(|k| turn_to_complex(Ratio::new(k as i64, n as i64))).collect();
    let terms = f.terms().iter().flat_map(|(a, c)| {
        chars.iter().enumerate().map(move |(k, ch)| {
            (Arrow::Twist { base: Box::new(a.clone()), turn: k as u32 }, ch * c)
        })
    });
    AlgebraElement::new(twisted, terms)
}

/// `Γ_σ = Γ × ℤ/n` with `(γ₁,k₁)(γ₂,k₂) = (γ₁γ₂, k₁+k₂−s(γ₁,γ₂))`.
/// Element `(γ, k)` has index `γ·n + k`.
pub fn gamma_sigma(group: &FiniteGroup, sigma: &GroupCocycle, n: u32) -> Result<FiniteGroup> {
    let m = group.order();
    let nn = n as usize;
    let res = |a: u16, b: u16| -> Result<usize> {
        let p = sigma.eval(&GroupElem::Finite(a), &GroupElem::Finite(b));
        p.residue_mod(n).map(|r| r as usize).ok_or_else(|| Error::NotRootOfUnity(p.to_string()))
    };
    let mut names = Vec::with_capacity(m * nn);
    for a in 0..m as u16 {
        for k in 0..nn {
            names.push(format!("({},{k})", group.name(a)));
        }
    }
    let mut table = vec![vec![0usize; m * nn]; m * nn];
    for a in 0..m as u16 {
        for b in 0..m as u16 {
            let s = res(a, b)?;
            let ab = group.mul(a, b) as usize;
            for ka in 0..nn {
                for kb in 0..nn {
                    table[a as usize * nn + ka][b as usize * nn + kb] = ab * nn + (ka + kb + nn - s) % nn;
                }
            }
        }
    }
    FiniteGroup::from_table(names, table)
}

/// Result of comparing `X ⋊ Γ_σ` with `(X ⋊ Γ)_σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsomorphismCheck {
    pub arrows: usize,
    pub pairs_checked: usize,
    pub mismatches: usize,
}

impl IsomorphismCheck {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Builds `X ⋊ Γ_σ` for a twist of a finite transformation groupoid and
/// checks that `(x, (γ, k)) ↦ ((x, γ), k)` preserves source, range,
/// products and inverses.
pub fn check_gamma_sigma(twisted: &Arc<Algebra>) -> Result<IsomorphismCheck> {
    let z = twist_of(twisted)?;
    let Groupoid::Action(t) = z.base_groupoid() else {
        return Err(Error::InvalidArgument("base is not a transformation groupoid".into()));
    };
    let GroupSpec::Finite(group) = t.group() else { return Err(Error::InfiniteBackend) };
    let gc = match z.base().cocycle() {
        Cocycle::Trivial => GroupCocycle::Trivial,
        Cocycle::Group(gc) => gc.clone(),
        _ => return Err(Error::InvalidArgument("cocycle is not pulled back from the group".into())),
    };
    let n = z.order();
    let gs = gamma_sigma(group, &gc, n)?;
    let perms: Vec<Vec<usize>> =
        t.permutations().into_iter().flat_map(|p| std::iter::repeat_n(p, n as usize)).collect();
    let lhs = Groupoid::Action(TransformationGroupoid::new(
        t.points().to_vec(),
        GroupSpec::finite(gs),
        perms,
    )?);
    let rhs = twisted.groupoid();
    let map = |a: &Arrow| -> Arrow {
        let Arrow::Action { point, elem: GroupElem::Finite(e) } = a else { unreachable!() };
        let (gamma, k) = (*e as u32 / n, *e as u32 % n);
        Arrow::Twist {
            base: Box::new(Arrow::Action { point: *point, elem: GroupElem::Finite(gamma as u16) }),
            turn: k,
        }
    };
    let arrows = lhs.arrows()?;
    let mut mismatches = 0;
    let mut pairs = 0;
    let images: Vec<Arrow> = arrows.iter().map(map).collect();
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != rhs.arrows()?.len() || sorted.len() != images.len() {
        mismatches += 1;
    }
    for (a, ia) in arrows.iter().zip(&images) {
        if lhs.src(a) != rhs.src(ia) || lhs.tgt(a) != rhs.tgt(ia) || map(&lhs.invert(a)) != rhs.invert(ia) {
            mismatches += 1;
        }
        for (b, ib) in arrows.iter().zip(&images) {
            if let Some(ab) = lhs.try_compose(a, b) {
                pairs += 1;
                if rhs.try_compose(ia, ib) != Some(map(&ab)) {
                    mismatches += 1;
                }
            }
        }
    }
    Ok(IsomorphismCheck { arrows: arrows.len(), pairs_checked: pairs, mismatches })
}
