//! Finitely supported functions on a groupoid with the twisted convolution
//! product, the twisted involution and the I-norm.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::groupoid::{Arrow, Groupoid};

/// Default cap on the number of terms in a convolution power.
pub const DEFAULT_TERM_CAP: usize = 5_000_000;

const CHUNK: usize = 2048;

/// A groupoid together with a cocycle.
#[derive(Debug)]
pub struct Algebra {
    groupoid: Groupoid,
    cocycle: Cocycle,
}

impl Algebra {
    pub fn new(groupoid: Groupoid, cocycle: Cocycle) -> Arc<Algebra> {
        Arc::new(Algebra { groupoid, cocycle })
    }

    pub fn groupoid(&self) -> &Groupoid {
        &self.groupoid
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }
}

/// An element of `C_c(G, σ)`. Exact zeros are never stored.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    algebra: Arc<Algebra>,
    terms: BTreeMap<Arrow, Complex64>,
}

/// One row of a convolution power sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerEntry {
    pub n: usize,
    pub norm: f64,
    /// `norm^(1/n)`, an upper bound for the ℓ¹ spectral radius.
    pub root: f64,
    pub terms: usize,
}

fn prune(mut terms: BTreeMap<Arrow, Complex64>) -> BTreeMap<Arrow, Complex64> {
    terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    terms
}

impl AlgebraElement {
    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        AlgebraElement { algebra: algebra.clone(), terms: BTreeMap::new() }
    }

    /// Builds an element from arrow coefficients; repeated arrows are summed.
    pub fn new(
        algebra: &Arc<Algebra>,
        terms: impl IntoIterator<Item = (Arrow, Complex64)>,
    ) -> Result<Self> {
        let g = algebra.groupoid();
        let mut map = BTreeMap::new();
        for (a, c) in terms {
            if !g.contains(&a) {
                return Err(Error::UnknownArrow(format!("{a:?}")));
            }
            *map.entry(a).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(AlgebraElement { algebra: algebra.clone(), terms: prune(map) })
    }

    pub fn delta(algebra: &Arc<Algebra>, a: Arrow) -> Result<Self> {
        Self::new(algebra, [(a, Complex64::new(1.0, 0.0))])
    }

    /// The identity `(1/w) Σ_x δ_{id_x}`, where `w` is the arrow weight.
    pub fn unit_element(algebra: &Arc<Algebra>) -> Self {
        let g = algebra.groupoid();
        let c = Complex64::new(1.0 / g.fiber_weight(), 0.0);
        let terms = (0..g.num_units()).map(|x| (g.identity(x), c)).collect();
        AlgebraElement { algebra: algebra.clone(), terms }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn groupoid(&self) -> &Groupoid {
        self.algebra.groupoid()
    }

    pub fn terms(&self) -> &BTreeMap<Arrow, Complex64> {
        &self.terms
    }

    pub fn coeff(&self, a: &Arrow) -> Complex64 {
        self.terms.get(a).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_parent(&self, other: &AlgebraElement) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    fn combine(&self, other: &AlgebraElement, s: f64) -> Result<AlgebraElement> {
        self.same_parent(other)?;
        let mut terms = self.terms.clone();
        for (a, c) in &other.terms {
            *terms.entry(a.clone()).or_default() += c * s;
        }
        Ok(AlgebraElement { algebra: self.algebra.clone(), terms: prune(terms) })
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: Complex64) -> AlgebraElement {
        let terms = self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect();
        AlgebraElement { algebra: self.algebra.clone(), terms: prune(terms) }
    }

    /// `(f ⋆ h)(γ) = Σ_{αβ=γ} σ(α,β) f(α) h(β)`, weighted by the arrow mass.
    pub fn convolve(&self, h: &AlgebraElement) -> Result<AlgebraElement> {
        self.same_parent(h)?;
        let g = self.groupoid();
        let sigma = self.algebra.cocycle();
        let trivial = matches!(sigma, Cocycle::Trivial);
        let w = g.fiber_weight();
        let mut h_by_tgt: Vec<Vec<(&Arrow, Complex64)>> = vec![Vec::new(); g.num_units()];
        for (b, c) in &h.terms {
            h_by_tgt[g.tgt(b)].push((b, *c));
        }
        let f_terms: Vec<(&Arrow, &Complex64)> = self.terms.iter().collect();
        let partials: Vec<HashMap<Arrow, Complex64>> = f_terms
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc: HashMap<Arrow, Complex64> = HashMap::new();
                for &(a, fa) in chunk {
                    let fa = fa * w;
                    for &(b, hb) in &h_by_tgt[g.src(a)] {
                        let ab = g.try_compose(a, b).expect("composable by construction");
                        let mut v = fa * hb;
                        if !trivial {
                            v *= sigma.eval(g, a, b).to_complex();
                        }
                        *acc.entry(ab).or_default() += v;
                    }
                }
                acc
            })
            .collect();
        let mut terms = BTreeMap::new();
        for part in partials {
            for (a, c) in part {
                *terms.entry(a).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        Ok(AlgebraElement { algebra: self.algebra.clone(), terms: prune(terms) })
    }

    /// `f*(γ) = conj(σ(γ⁻¹, γ)) conj(f(γ⁻¹))`.
    pub fn involve(&self) -> AlgebraElement {
        let g = self.groupoid();
        let sigma = self.algebra.cocycle();
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| {
                // a = γ⁻¹, so γ = a⁻¹ and σ(γ⁻¹, γ) = σ(a, a⁻¹)
                let ai = g.invert(a);
                let s = sigma.eval(g, a, &ai).to_complex();
                (ai, (s * c).conj())
            })
            .collect();
        AlgebraElement { algebra: self.algebra.clone(), terms }
    }

    /// `sup_x max(Σ_{s(γ)=x} |f(γ)|, Σ_{r(γ)=x} |f(γ)|)` with arrow weights.
    pub fn i_norm(&self) -> f64 {
        let g = self.groupoid();
        let w = g.fiber_weight();
        let mut by_src = vec![0.0; g.num_units()];
        let mut by_tgt = vec![0.0; g.num_units()];
        for (a, c) in &self.terms {
            let m = c.norm() * w;
            by_src[g.src(a)] += m;
            by_tgt[g.tgt(a)] += m;
        }
        by_src.into_iter().chain(by_tgt).fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `i_norm(self - other)`.
    pub fn distance(&self, other: &AlgebraElement) -> Result<f64> {
        Ok(self.sub(other)?.i_norm())
    }

    /// Largest word length in the support; `None` on finite backends.
    pub fn word_diameter(&self) -> Option<usize> {
        let g = self.groupoid();
        self.terms.keys().map(|a| g.word_length(a)).try_fold(0, |m, l| l.map(|l| m.max(l)))
    }

    /// Distance `max |f - f*|` from self-adjointness.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.sub(&self.involve()).expect("same parent").sup_norm()
    }

    /// `‖fⁿ‖_I` for `n = 1..=max_n`, chaining `fⁿ⁺¹ = fⁿ ⋆ f`.
    pub fn power_seq(&self, max_n: usize, cap: usize) -> Result<Vec<PowerEntry>> {
        let mut out = Vec::with_capacity(max_n);
        let mut p = self.clone();
        for n in 1..=max_n {
            if n > 1 {
                p = p.convolve(self)?;
            }
            if p.len() > cap {
                return Err(Error::SupportExplosion { achieved: n - 1, terms: p.len(), cap });
            }
            let norm = p.i_norm();
            out.push(PowerEntry { n, norm, root: norm.powf(1.0 / n as f64), terms: p.len() });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{extend_group_cocycle, GroupCocycle};
    use crate::group::{FiniteGroup, GroupElem, GroupSpec, LatticePoint};
    use crate::groupoid::TransformationGroupoid;
    use crate::phase::Phase;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn z2_twisted() -> Arc<Algebra> {
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
    fn twisted_square_and_star() {
        let alg = z2_twisted();
        let dg = AlgebraElement::delta(&alg, Arrow::action(0, GroupElem::Finite(1))).unwrap();
        let sq = dg.convolve(&dg).unwrap();
        assert_eq!(sq.terms().len(), 1);
        assert_eq!(sq.coeff(&Arrow::action(0, GroupElem::Finite(0))), c(-1.0));
        let st = dg.involve();
        assert_eq!(st.coeff(&Arrow::action(0, GroupElem::Finite(1))), c(-1.0));
        let seq = dg.power_seq(4, DEFAULT_TERM_CAP).unwrap();
        assert!(seq.iter().all(|e| e.norm == 1.0));
    }

    #[test]
    fn integer_walk_powers_are_exact() {
        let g = Groupoid::Action(
            TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::free_abelian(&["t"])).unwrap(),
        );
        let alg = Algebra::new(g, Cocycle::Trivial);
        let at = |k: i32| Arrow::action(0, GroupElem::Lattice(LatticePoint::from_slice(&[k])));
        let f = AlgebraElement::new(&alg, [(at(1), c(1.0)), (at(-1), c(1.0))]).unwrap();
        for e in f.power_seq(8, DEFAULT_TERM_CAP).unwrap() {
            assert_eq!(e.norm, 2f64.powi(e.n as i32));
            assert_eq!(e.terms, e.n + 1);
        }
        assert!(matches!(
            f.power_seq(8, 4),
            Err(Error::SupportExplosion { achieved: 3, terms: 5, cap: 4 })
        ));
    }

    #[test]
    fn parent_mismatch() {
        let a = z2_twisted();
        let b = z2_twisted();
        let f = AlgebraElement::unit_element(&a);
        let h = AlgebraElement::unit_element(&b);
        assert_eq!(f.convolve(&h).unwrap_err(), Error::ParentMismatch);
    }

    #[test]
    fn zero_sums_are_pruned() {
        let alg = z2_twisted();
        let e = Arrow::action(0, GroupElem::Finite(0));
        let f = AlgebraElement::new(&alg, [(e.clone(), c(1.0)), (e, c(-1.0))]).unwrap();
        assert!(f.is_empty());
        assert_eq!(f.i_norm(), 0.0);
    }
}
