//! Normalized 2-cocycles on groupoids and groups, with validation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElem, GroupSpec};
use crate::groupoid::{Arrow, Groupoid};
use crate::phase::Phase;

/// A 2-cocycle on a group.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupCocycle {
    Trivial,
    /// `values[a][b] = σ(a, b)` over a finite group's element indices.
    Table { group: Arc<FiniteGroup>, values: Vec<Vec<Phase>> },
    /// `σ(m, n) = exp(2πi mᵀΘn)` on a free abelian group.
    Bilinear(Vec<Vec<Ratio<i64>>>),
}

impl GroupCocycle {
    pub fn table(group: &FiniteGroup, values: Vec<Vec<Phase>>) -> Result<Self> {
        let n = group.order();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::GroupMismatch(format!("cocycle table must be {n}×{n}")));
        }
        Ok(GroupCocycle::Table { group: Arc::new(group.clone()), values })
    }

    /// The coboundary `b(a)b(c)/b(ac)` of a function on group elements.
    pub fn table_coboundary(group: &FiniteGroup, b: &[Phase]) -> Result<Self> {
        if b.len() != group.order() {
            return Err(Error::GroupMismatch("coboundary function has the wrong length".into()));
        }
        if !b[group.identity() as usize].is_one() {
            return Err(Error::NotNormalized(group.name(group.identity()).to_string()));
        }
        let n = group.order() as u16;
        let values = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| b[i as usize].mul(b[j as usize]).div(b[group.mul(i, j) as usize]))
                    .collect()
            })
            .collect();
        Self::table(group, values)
    }

    pub fn bilinear(theta: Vec<Vec<Ratio<i64>>>) -> Result<Self> {
        let d = theta.len();
        if theta.iter().any(|r| r.len() != d) {
            return Err(Error::GroupMismatch("Θ must be square".into()));
        }
        Ok(GroupCocycle::Bilinear(theta))
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            GroupCocycle::Trivial => true,
            GroupCocycle::Table { values, .. } => values.iter().flatten().all(|p| p.is_one()),
            GroupCocycle::Bilinear(t) => t.iter().flatten().all(|r| r.is_integer()),
        }
    }

    pub fn eval(&self, a: &GroupElem, b: &GroupElem) -> Phase {
        match (self, a, b) {
            (GroupCocycle::Trivial, _, _) => Phase::ONE,
            (GroupCocycle::Table { values, .. }, GroupElem::Finite(i), GroupElem::Finite(j)) => {
                values[*i as usize][*j as usize]
            }
            (GroupCocycle::Bilinear(theta), GroupElem::Lattice(m), GroupElem::Lattice(n)) => {
                let mut acc = Ratio::from_integer(0);
                for (i, &mi) in m.coords().iter().enumerate() {
                    if mi == 0 {
                        continue;
                    }
                    for (j, &nj) in n.coords().iter().enumerate() {
                        if nj != 0 {
                            acc += theta[i][j] * Ratio::from_integer((mi as i64) * (nj as i64));
                        }
                    }
                }
                Phase::from_ratio(acc)
            }
            _ => panic!("group cocycle evaluated on elements of another group"),
        }
    }

    /// Checks that this cocycle lives on `group`.
    pub fn check_group(&self, group: &GroupSpec) -> Result<()> {
        match (self, group) {
            (GroupCocycle::Trivial, _) => Ok(()),
            (GroupCocycle::Table { group: t, .. }, GroupSpec::Finite(g)) => {
                if t.table() == g.table() {
                    Ok(())
                } else {
                    Err(Error::GroupMismatch("cocycle table is over a different finite group".into()))
                }
            }
            (GroupCocycle::Bilinear(theta), GroupSpec::FreeAbelian(gens)) => {
                if theta.len() == gens.len() {
                    Ok(())
                } else {
                    Err(Error::GroupMismatch(format!(
                        "Θ is {}×{} but the group has rank {}",
                        theta.len(),
                        theta.len(),
                        gens.len()
                    )))
                }
            }
            (c, g) => Err(Error::GroupMismatch(format!(
                "{} cocycle on a {} group",
                c.kind_name(),
                g.kind_name()
            ))),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupCocycle::Trivial => "trivial",
            GroupCocycle::Table { .. } => "table",
            GroupCocycle::Bilinear(_) => "bilinear",
        }
    }
}

/// A 2-cocycle on a groupoid.
#[derive(Clone, Debug, PartialEq)]
pub enum Cocycle {
    Trivial,
    /// Explicit values on composable pairs; absent pairs take the value 1.
    Table(BTreeMap<(Arrow, Arrow), Phase>),
    /// A group cocycle pulled back along `(x, γ) ↦ γ`.
    Group(GroupCocycle),
    /// `σ(α, β) = b(α) b(β) / b(αβ)`; absent arrows take the value 1.
    Coboundary(BTreeMap<Arrow, Phase>),
}

impl Cocycle {
    /// Evaluates `σ(α, β)` on a composable pair.
    pub fn eval(&self, g: &Groupoid, a: &Arrow, b: &Arrow) -> Phase {
        match self {
            Cocycle::Trivial => Phase::ONE,
            Cocycle::Table(t) => t.get(&(a.clone(), b.clone())).copied().unwrap_or(Phase::ONE),
            Cocycle::Group(gc) => match (a, b) {
                (Arrow::Action { elem: ea, .. }, Arrow::Action { elem: eb, .. }) => gc.eval(ea, eb),
                _ => panic!("group cocycle on a non-transformation groupoid"),
            },
            Cocycle::Coboundary(bf) => {
                let val = |x: &Arrow| bf.get(x).copied().unwrap_or(Phase::ONE);
                let ab = g.try_compose(a, b).expect("cocycle evaluated on a non-composable pair");
                val(a).mul(val(b)).div(val(&ab))
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Cocycle::Trivial => true,
            Cocycle::Table(t) => t.values().all(|p| p.is_one()),
            Cocycle::Group(gc) => gc.is_trivial(),
            Cocycle::Coboundary(b) => b.values().all(|p| p.is_one()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Cocycle::Trivial => "trivial",
            Cocycle::Table(_) => "table",
            Cocycle::Group(_) => "group",
            Cocycle::Coboundary(_) => "coboundary",
        }
    }
}

/// Lifts `σ_Γ` to `X ⋊ Γ` by `σ((x₁,γ₁),(x₂,γ₂)) = σ_Γ(γ₁,γ₂)`.
pub fn extend_group_cocycle(sigma: &GroupCocycle, g: &Groupoid) -> Result<Cocycle> {
    match g {
        Groupoid::Action(t) => {
            sigma.check_group(t.group())?;
            Ok(match sigma {
                GroupCocycle::Trivial => Cocycle::Trivial,
                s => Cocycle::Group(s.clone()),
            })
        }
        _ => Err(Error::GroupMismatch("groupoid is not a transformation groupoid".into())),
    }
}

/// The coboundary of a unit-modulus function on arrows.
pub fn coboundary(b: BTreeMap<Arrow, Phase>, g: &Groupoid) -> Result<Cocycle> {
    for x in 0..g.num_units() {
        if let Some(p) = b.get(&g.identity(x)) {
            if !p.is_one() {
                return Err(Error::NotNormalized(g.unit_label(x)));
            }
        }
    }
    if let Some(a) = b.keys().find(|a| !g.contains(a)) {
        return Err(Error::UnknownArrow(format!("{a:?}")));
    }
    Ok(Cocycle::Coboundary(b))
}

/// The isotropy group at a unit together with the restricted cocycle.
#[derive(Clone, Debug)]
pub enum IsotropyGroup {
    /// A finite isotropy group: `arrows[i]` realizes element `i` of `table`.
    Finite { arrows: Vec<Arrow>, table: Arc<FiniteGroup> },
    /// The stabilizer of the unit inside an infinite acting group.
    Stabilizer(GroupSpec),
}

#[derive(Clone, Debug)]
pub struct IsotropyCocycle {
    pub unit: usize,
    pub group: IsotropyGroup,
    pub cocycle: GroupCocycle,
}

impl IsotropyCocycle {
    pub fn eval(&self, a: &Arrow, b: &Arrow) -> Phase {
        match &self.group {
            IsotropyGroup::Finite { arrows, .. } => {
                let i = arrows.iter().position(|x| x == a).expect("arrow outside isotropy");
                let j = arrows.iter().position(|x| x == b).expect("arrow outside isotropy");
                self.cocycle.eval(&GroupElem::Finite(i as u16), &GroupElem::Finite(j as u16))
            }
            IsotropyGroup::Stabilizer(_) => match (a, b) {
                (Arrow::Action { elem: ea, .. }, Arrow::Action { elem: eb, .. }) => {
                    self.cocycle.eval(ea, eb)
                }
                _ => panic!("stabilizer cocycle on a non-transformation arrow"),
            },
        }
    }
}

/// `σ_x`, the restriction of `σ` to `G_x^x`.
///
/// Finite isotropy groups are tabulated. An infinite stabilizer is only
/// supported when the whole group fixes `x`; the restriction is then the
/// group cocycle itself.
pub fn restrict_isotropy(g: &Groupoid, sigma: &Cocycle, x: usize) -> Result<IsotropyCocycle> {
    if x >= g.num_units() {
        return Err(Error::UnknownUnit(x));
    }
    if !g.is_finite() {
        let Groupoid::Action(t) = g else { return Err(Error::InfiniteBackend) };
        let fixed = (0..t.group().num_generators()).all(|i| t.permutations()[i][x] == x);
        if !fixed {
            return Err(Error::InvalidArgument(
                "isotropy of an infinite group at a non-fixed point is not enumerable".into(),
            ));
        }
        let cocycle = match sigma {
            Cocycle::Trivial => GroupCocycle::Trivial,
            Cocycle::Group(gc) => gc.clone(),
            _ => return Err(Error::InfiniteBackend),
        };
        return Ok(IsotropyCocycle { unit: x, group: IsotropyGroup::Stabilizer(t.group().clone()), cocycle });
    }
    let mut arrows = g.isotropy(x, None)?;
    let id = g.identity(x);
    arrows.retain(|a| *a != id);
    arrows.insert(0, id);
    let k = arrows.len();
    let index = |a: &Arrow| arrows.iter().position(|b| b == a).expect("isotropy not closed");
    let table: Vec<Vec<usize>> = arrows
        .iter()
        .map(|a| arrows.iter().map(|b| index(&g.compose(a, b).expect("isotropy pair"))).collect())
        .collect();
    let names = arrows.iter().map(|a| g.format_arrow(a)).collect();
    let group = FiniteGroup::from_table(names, table)?;
    let values: Vec<Vec<Phase>> =
        arrows.iter().map(|a| arrows.iter().map(|b| sigma.eval(g, a, b)).collect()).collect();
    debug_assert_eq!(values.len(), k);
    let cocycle = if values.iter().flatten().all(|p| p.is_one()) {
        GroupCocycle::Trivial
    } else {
        GroupCocycle::table(&group, values)?
    };
    Ok(IsotropyCocycle {
        unit: x,
        group: IsotropyGroup::Finite { arrows, table: Arc::new(group) },
        cocycle,
    })
}

/// Which composable tuples `validate` visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Exhaustive,
    /// Every tuple of arrows of word length at most `R`.
    Ball(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Identity {
    Normalization,
    Associativity,
    InverseSymmetry,
    FiberRelation,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::Normalization => "normalization",
            Identity::Associativity => "associativity",
            Identity::InverseSymmetry => "inverse symmetry",
            Identity::FiberRelation => "fiber relation",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub identity: Identity,
    pub arrows: Vec<String>,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub scope: Scope,
    pub checked: usize,
    pub violation_count: usize,
    /// The first violations found, capped at [`ValidationReport::MAX_LISTED`].
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub const MAX_LISTED: usize = 100;

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks normalization, associativity, `σ(μ⁻¹,μ) = σ(μ,μ⁻¹)` and
/// `σ(γμ⁻¹,μ)σ(γ,μ⁻¹) = σ(μ⁻¹,μ)` on the given scope.
pub fn validate(g: &Groupoid, sigma: &Cocycle, scope: Scope) -> Result<ValidationReport> {
    let radius = match scope {
        Scope::Exhaustive if !g.is_finite() => return Err(Error::ScopeUnsupported),
        Scope::Exhaustive => None,
        Scope::Ball(r) => Some(r),
    };
    let arrows = g.arrows_within(if g.is_finite() { None } else { radius })?;
    let by_tgt = {
        let mut v = vec![Vec::new(); g.num_units()];
        for a in &arrows {
            v[g.tgt(a)].push(a);
        }
        v
    };
    let by_src = {
        let mut v = vec![Vec::new(); g.num_units()];
        for a in &arrows {
            v[g.src(a)].push(a);
        }
        v
    };
    let fmt_all = |xs: &[&Arrow]| xs.iter().map(|a| g.format_arrow(a)).collect::<Vec<_>>();
    let check = |identity, lhs: Phase, rhs: Phase, xs: &[&Arrow], out: &mut Vec<Violation>| {
        if !lhs.approx_eq(rhs) {
            out.push(Violation { identity, arrows: fmt_all(xs), deviation: lhs.deviation(rhs) });
        }
    };

    let per_arrow: Vec<(usize, Vec<Violation>)> = arrows
        .par_iter()
        .map(|a| {
            let mut out = Vec::new();
            let mut checked = 0usize;
            let s = g.src(a);
            let r = g.tgt(a);
            let ids = [g.identity(r), g.identity(s)];
            check(Identity::Normalization, sigma.eval(g, &ids[0], a), Phase::ONE, &[&ids[0], a], &mut out);
            check(Identity::Normalization, sigma.eval(g, a, &ids[1]), Phase::ONE, &[a, &ids[1]], &mut out);
            let ai = g.invert(a);
            check(
                Identity::InverseSymmetry,
                sigma.eval(g, &ai, a),
                sigma.eval(g, a, &ai),
                &[a],
                &mut out,
            );
            checked += 3;
            for b in &by_tgt[s] {
                let ab = g.try_compose(a, b).expect("composable");
                let sab = sigma.eval(g, a, b);
                for c in &by_tgt[g.src(b)] {
                    let bc = g.try_compose(b, c).expect("composable");
                    let lhs = sab.mul(sigma.eval(g, &ab, c));
                    let rhs = sigma.eval(g, b, c).mul(sigma.eval(g, a, &bc));
                    check(Identity::Associativity, lhs, rhs, &[a, b, c], &mut out);
                    checked += 1;
                }
            }
            // a plays γ, m plays μ with s(γ) = s(μ)
            for m in &by_src[s] {
                let mi = g.invert(m);
                let gmi = g.try_compose(a, &mi).expect("composable");
                let lhs = sigma.eval(g, &gmi, m).mul(sigma.eval(g, a, &mi));
                check(Identity::FiberRelation, lhs, sigma.eval(g, &mi, m), &[a, m], &mut out);
                checked += 1;
            }
            (checked, out)
        })
        .collect();

    let mut report = ValidationReport { scope, checked: 0, violation_count: 0, violations: Vec::new() };
    for (n, vs) in per_arrow {
        report.checked += n;
        report.violation_count += vs.len();
        for v in vs {
            if report.violations.len() < ValidationReport::MAX_LISTED {
                report.violations.push(v);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::LatticePoint;
    use crate::groupoid::TransformationGroupoid;

    fn z2_on(points: usize) -> Groupoid {
        let pts = (0..points).map(|i| format!("x{i}")).collect();
        Groupoid::Action(
            TransformationGroupoid::trivial(pts, GroupSpec::finite(FiniteGroup::cyclic(2))).unwrap(),
        )
    }

    fn minus_one_z2() -> GroupCocycle {
        GroupCocycle::table(
            &FiniteGroup::cyclic(2),
            vec![vec![Phase::ONE, Phase::ONE], vec![Phase::ONE, Phase::turn(1, 2)]],
        )
        .unwrap()
    }

    #[test]
    fn z2_sign_cocycle_validates_and_restricts() {
        let g = z2_on(2);
        let s = extend_group_cocycle(&minus_one_z2(), &g).unwrap();
        let rep = validate(&g, &s, Scope::Exhaustive).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        let gx = Arrow::action(1, GroupElem::Finite(1));
        assert_eq!(s.eval(&g, &gx, &gx), Phase::turn(1, 2));
        for x in 0..2 {
            let iso = restrict_isotropy(&g, &s, x).unwrap();
            let gx = Arrow::action(x, GroupElem::Finite(1));
            assert_eq!(iso.eval(&gx, &gx), Phase::turn(1, 2));
        }
    }

    #[test]
    fn corrupted_table_is_caught() {
        let g = z2_on(1);
        let e = Arrow::action(0, GroupElem::Finite(0));
        let t = Arrow::action(0, GroupElem::Finite(1));
        let mut m = BTreeMap::new();
        m.insert((e.clone(), t.clone()), Phase::turn(1, 2));
        let rep = validate(&g, &Cocycle::Table(m), Scope::Exhaustive).unwrap();
        assert!(!rep.passed());
        assert!(rep.violations.iter().any(|v| v.identity == Identity::Normalization));
    }

    #[test]
    fn bilinear_torus_cocycle_on_a_ball() {
        let g = Groupoid::Action(
            TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::free_abelian(&["u", "v"]))
                .unwrap(),
        );
        let theta = vec![
            vec![Ratio::from_integer(0), Ratio::new(1, 2)],
            vec![Ratio::from_integer(0), Ratio::from_integer(0)],
        ];
        let s = extend_group_cocycle(&GroupCocycle::bilinear(theta).unwrap(), &g).unwrap();
        assert!(validate(&g, &s, Scope::Ball(3)).unwrap().passed());
        assert_eq!(validate(&g, &s, Scope::Exhaustive).unwrap_err(), Error::ScopeUnsupported);
        let u = Arrow::action(0, GroupElem::Lattice(LatticePoint::from_slice(&[1, 0])));
        let v = Arrow::action(0, GroupElem::Lattice(LatticePoint::from_slice(&[0, 1])));
        assert_eq!(s.eval(&g, &u, &v), Phase::turn(1, 2));
        assert_eq!(s.eval(&g, &v, &u), Phase::ONE);
    }

    #[test]
    fn mismatched_extension_is_rejected() {
        let g = z2_on(1);
        let theta = vec![vec![Ratio::from_integer(0)]];
        let r = extend_group_cocycle(&GroupCocycle::Bilinear(theta), &g);
        assert!(matches!(r, Err(Error::GroupMismatch(_))));
    }

    #[test]
    fn coboundary_normalization() {
        let g = z2_on(1);
        let mut b = BTreeMap::new();
        b.insert(g.identity(0), Phase::turn(1, 2));
        assert!(matches!(coboundary(b, &g), Err(Error::NotNormalized(_))));
        let mut b = BTreeMap::new();
        b.insert(Arrow::action(0, GroupElem::Finite(1)), Phase::from_turns_f64(0.3));
        let s = coboundary(b, &g).unwrap();
        assert!(validate(&g, &s, Scope::Exhaustive).unwrap().passed());
    }
}
