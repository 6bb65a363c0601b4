//! Étale groupoids: finite multiplication tables, transformation groupoids
//! `X ⋊ Γ`, and finite-fiber twists of either.
//!
//! The Haar system is always counting measure on the source fibers, scaled by
//! [`Groupoid::fiber_weight`] (1 except for finite cyclic twists, which carry
//! the normalized counting measure on the fiber).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::constructions::ztwist::ZTwistGroupoid;
use crate::error::{Error, Result};
use crate::group::{GroupElem, GroupSpec};

/// A point of the unit space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unit {
    pub index: usize,
    pub label: String,
}

/// Canonical arrow identifier.
///
/// Transformation arrows are `(x, γ)` with `s = x` and `r = γ·x`. Twist arrows
/// pair a base arrow with a residue `k`, meaning the fiber value `exp(2πi k/n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Arrow {
    Table(u32),
    Action { point: u32, elem: GroupElem },
    Twist { base: Box<Arrow>, turn: u32 },
}

impl Arrow {
    pub fn action(point: usize, elem: GroupElem) -> Arrow {
        Arrow::Action { point: point as u32, elem }
    }
}

/// A finite groupoid given by an explicit arrow set and composition table.
///
/// Arrows `0..units` are the identities, in unit order.
#[derive(Clone, Debug)]
pub struct TableGroupoid {
    unit_names: Vec<String>,
    arrow_names: Vec<String>,
    src: Vec<u32>,
    tgt: Vec<u32>,
    comp: Vec<Option<u32>>,
    inv: Vec<u32>,
}

impl TableGroupoid {
    /// `arrows` lists the non-identity arrows as `(name, src, tgt)`;
    /// `products` lists `(a, b, c)` by name, meaning `a b = c`, for every
    /// composable pair of non-identity arrows. Identities carry the unit names
    /// and their products are implicit.
    pub fn new(
        unit_names: Vec<String>,
        arrows: Vec<(String, usize, usize)>,
        products: &[(String, String, String)],
    ) -> Result<Self> {
        let u = unit_names.len();
        if u == 0 {
            return Err(Error::InvalidGroupoid("no units".into()));
        }
        let mut arrow_names = unit_names.clone();
        let mut src: Vec<u32> = (0..u as u32).collect();
        let mut tgt = src.clone();
        for (name, s, t) in arrows {
            if s >= u || t >= u {
                return Err(Error::InvalidGroupoid(format!("arrow {name} has an unknown endpoint")));
            }
            if arrow_names.contains(&name) {
                return Err(Error::InvalidGroupoid(format!("duplicate arrow name {name}")));
            }
            arrow_names.push(name);
            src.push(s as u32);
            tgt.push(t as u32);
        }
        let m = arrow_names.len();
        let lookup = |n: &str| {
            arrow_names
                .iter()
                .position(|a| a == n)
                .ok_or_else(|| Error::InvalidGroupoid(format!("unknown arrow {n}")))
        };
        let mut comp = vec![None; m * m];
        for a in 0..m {
            for b in 0..m {
                if src[a] != tgt[b] {
                    continue;
                }
                if a < u {
                    comp[a * m + b] = Some(b as u32);
                } else if b < u {
                    comp[a * m + b] = Some(a as u32);
                }
            }
        }
        for (an, bn, cn) in products {
            let (a, b, c) = (lookup(an)?, lookup(bn)?, lookup(cn)?);
            if src[a] != tgt[b] {
                return Err(Error::InvalidGroupoid(format!("product {an} {bn} listed for a non-composable pair")));
            }
            if src[c] != src[b] || tgt[c] != tgt[a] {
                return Err(Error::InvalidGroupoid(format!("product {an} {bn} = {cn} has the wrong endpoints")));
            }
            if a < u || b < u {
                if comp[a * m + b] != Some(c as u32) {
                    return Err(Error::InvalidGroupoid(format!("product {an} {bn} contradicts the unit law")));
                }
                continue;
            }
            if comp[a * m + b].is_some() {
                return Err(Error::InvalidGroupoid(format!("product {an} {bn} listed twice")));
            }
            comp[a * m + b] = Some(c as u32);
        }
        for a in 0..m {
            for b in 0..m {
                if src[a] == tgt[b] && comp[a * m + b].is_none() {
                    return Err(Error::InvalidGroupoid(format!(
                        "missing product {} {}",
                        arrow_names[a], arrow_names[b]
                    )));
                }
            }
        }
        Self::from_parts(unit_names, arrow_names, src, tgt, comp)
    }

    /// The pair groupoid on `n` units: one arrow `j<-i` from each unit to each other.
    pub fn pair(n: usize) -> Result<Self> {
        let units: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let name = |t: usize, s: usize| format!("x{t}<-x{s}");
        let mut arrows = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s != t {
                    arrows.push((name(t, s), s, t));
                }
            }
        }
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k {
                        let c = if i == k { units[i].clone() } else { name(k, i) };
                        products.push((name(k, j), name(j, i), c));
                    }
                }
            }
        }
        Self::new(units, arrows, &products)
    }

    pub fn arrow_endpoints(&self, a: u32) -> (usize, usize) {
        (self.src[a as usize] as usize, self.tgt[a as usize] as usize)
    }

    pub fn num_units(&self) -> usize {
        self.unit_names.len()
    }

    /// Non-identity arrows as `(name, src, tgt)` and their products by name.
    pub fn describe(&self) -> (Vec<(String, usize, usize)>, Vec<(String, String, String)>) {
        let u = self.unit_names.len();
        let m = self.num_arrows();
        let arrows = (u..m)
            .map(|a| (self.arrow_names[a].clone(), self.src[a] as usize, self.tgt[a] as usize))
            .collect();
        let mut products = Vec::new();
        for a in u..m {
            for b in u..m {
                if let Some(c) = self.comp[a * m + b] {
                    products.push((
                        self.arrow_names[a].clone(),
                        self.arrow_names[b].clone(),
                        self.arrow_names[c as usize].clone(),
                    ));
                }
            }
        }
        (arrows, products)
    }

    fn from_parts(
        unit_names: Vec<String>,
        arrow_names: Vec<String>,
        src: Vec<u32>,
        tgt: Vec<u32>,
        comp: Vec<Option<u32>>,
    ) -> Result<Self> {
        let m = arrow_names.len();
        let at = |a: usize, b: usize| comp[a * m + b];
        for a in 0..m {
            for b in 0..m {
                let Some(ab) = at(a, b) else { continue };
                for c in 0..m {
                    let Some(bc) = at(b, c) else { continue };
                    if at(ab as usize, c) != at(a, bc as usize) {
                        return Err(Error::InvalidGroupoid(format!(
                            "associativity fails at ({}, {}, {})",
                            arrow_names[a], arrow_names[b], arrow_names[c]
                        )));
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(m);
        for a in 0..m {
            let (s, t) = (src[a] as usize, tgt[a] as usize);
            let found = (0..m).find(|&b| at(a, b) == Some(t as u32) && at(b, a) == Some(s as u32));
            match found {
                Some(b) => inv.push(b as u32),
                None => {
                    return Err(Error::InvalidGroupoid(format!("{} has no inverse", arrow_names[a])))
                }
            }
        }
        Ok(TableGroupoid { unit_names, arrow_names, src, tgt, comp, inv })
    }

    /// Tabulates any finite groupoid. Identities come first, then the
    /// remaining arrows in the source groupoid's enumeration order.
    pub fn tabulate(g: &Groupoid) -> Result<(Self, Vec<Arrow>)> {
        let all = g.arrows()?;
        let u = g.num_units();
        let mut ordered: Vec<Arrow> = (0..u).map(|x| g.identity(x)).collect();
        let ids: BTreeSet<Arrow> = ordered.iter().cloned().collect();
        ordered.extend(all.into_iter().filter(|a| !ids.contains(a)));
        let index: HashMap<&Arrow, u32> =
            ordered.iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
        let m = ordered.len();
        let mut comp = vec![None; m * m];
        for (i, a) in ordered.iter().enumerate() {
            for (j, b) in ordered.iter().enumerate() {
                if let Some(c) = g.try_compose(a, b) {
                    comp[i * m + j] = Some(index[&c]);
                }
            }
        }
        let table = Self::from_parts(
            (0..u).map(|x| g.unit_label(x)).collect(),
            ordered.iter().map(|a| g.format_arrow(a)).collect(),
            ordered.iter().map(|a| g.src(a) as u32).collect(),
            ordered.iter().map(|a| g.tgt(a) as u32).collect(),
            comp,
        )?;
        Ok((table, ordered))
    }

    pub fn num_arrows(&self) -> usize {
        self.arrow_names.len()
    }

    pub fn arrow_name(&self, a: u32) -> &str {
        &self.arrow_names[a as usize]
    }

    pub fn arrow_index(&self, name: &str) -> Option<u32> {
        self.arrow_names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn unit_names(&self) -> &[String] {
        &self.unit_names
    }

    fn compose(&self, a: u32, b: u32) -> Option<u32> {
        self.comp[a as usize * self.num_arrows() + b as usize]
    }
}

/// The transformation groupoid of a group acting on a finite set of points.
#[derive(Clone, Debug)]
pub struct TransformationGroupoid {
    points: Vec<String>,
    group: GroupSpec,
    perms: Vec<Vec<u32>>,
    inverse_perms: Vec<Vec<u32>>,
}

fn check_permutation(p: &[usize], n: usize, what: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::NotAPermutation(format!("{what}: length {} for {n} points", p.len())));
    }
    let mut seen = vec![false; n];
    for &i in p {
        if i >= n || seen[i] {
            return Err(Error::NotAPermutation(format!("{what}: {p:?}")));
        }
        seen[i] = true;
    }
    Ok(())
}

impl TransformationGroupoid {
    /// `perms[i]` is the permutation of the points induced by generator `i`
    /// (free kinds) or by element `i` (finite groups).
    pub fn new(points: Vec<String>, group: GroupSpec, perms: Vec<Vec<usize>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidGroupoid("empty space".into()));
        }
        if perms.len() != group.num_generators() {
            return Err(Error::NotAPermutation(format!(
                "expected {} permutations, got {}",
                group.num_generators(),
                perms.len()
            )));
        }
        let names = group.generator_names();
        for (i, p) in perms.iter().enumerate() {
            check_permutation(p, n, &names[i])?;
        }
        let compose = |p: &[usize], q: &[usize]| q.iter().map(|&k| p[k]).collect::<Vec<_>>();
        match &group {
            GroupSpec::Finite(g) => {
                for a in 0..g.order() as u16 {
                    for b in 0..g.order() as u16 {
                        let ab = g.mul(a, b) as usize;
                        if compose(&perms[a as usize], &perms[b as usize]) != perms[ab] {
                            return Err(Error::NotAHomomorphism(format!(
                                "π({}·{}) ≠ π({})π({})",
                                g.name(a),
                                g.name(b),
                                g.name(a),
                                g.name(b)
                            )));
                        }
                    }
                }
            }
            GroupSpec::FreeAbelian(_) => {
                for i in 0..perms.len() {
                    for j in 0..i {
                        if compose(&perms[i], &perms[j]) != compose(&perms[j], &perms[i]) {
                            return Err(Error::NotAHomomorphism(format!(
                                "generators {} and {} act by non-commuting permutations",
                                names[i], names[j]
                            )));
                        }
                    }
                }
            }
            GroupSpec::Free(_) => {}
        }
        let inverse_perms = perms
            .iter()
            .map(|p| {
                let mut q = vec![0u32; n];
                for (i, &j) in p.iter().enumerate() {
                    q[j] = i as u32;
                }
                q
            })
            .collect();
        Ok(TransformationGroupoid {
            points,
            group,
            perms: perms.into_iter().map(|p| p.into_iter().map(|i| i as u32).collect()).collect(),
            inverse_perms,
        })
    }

    /// The action of every generator (or element) is the identity.
    pub fn trivial(points: Vec<String>, group: GroupSpec) -> Result<Self> {
        let n = points.len();
        let perms = vec![(0..n).collect(); group.num_generators()];
        Self::new(points, group, perms)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn permutations(&self) -> Vec<Vec<usize>> {
        self.perms.iter().map(|p| p.iter().map(|&i| i as usize).collect()).collect()
    }

    /// `γ · x`.
    pub fn act(&self, elem: &GroupElem, x: usize) -> usize {
        match elem {
            GroupElem::Finite(g) => self.perms[*g as usize][x] as usize,
            GroupElem::Free(w) => {
                let mut y = x;
                for &l in w.letters().iter().rev() {
                    let g = l.unsigned_abs() as usize - 1;
                    y = if l > 0 { self.perms[g][y] } else { self.inverse_perms[g][y] } as usize;
                }
                y
            }
            GroupElem::Lattice(m) => {
                let mut y = x;
                for (g, &c) in m.coords().iter().enumerate() {
                    let p = if c > 0 { &self.perms[g] } else { &self.inverse_perms[g] };
                    for _ in 0..c.unsigned_abs() {
                        y = p[y] as usize;
                    }
                }
                y
            }
        }
    }
}

/// An étale groupoid with finitely many units.
#[derive(Clone, Debug)]
pub enum Groupoid {
    Table(TableGroupoid),
    Action(TransformationGroupoid),
    Twist(ZTwistGroupoid),
}

impl Groupoid {
    pub fn num_units(&self) -> usize {
        match self {
            Groupoid::Table(t) => t.unit_names.len(),
            Groupoid::Action(a) => a.points.len(),
            Groupoid::Twist(z) => z.base_groupoid().num_units(),
        }
    }

    pub fn unit_label(&self, x: usize) -> String {
        match self {
            Groupoid::Table(t) => t.unit_names[x].clone(),
            Groupoid::Action(a) => a.points[x].clone(),
            Groupoid::Twist(z) => z.base_groupoid().unit_label(x),
        }
    }

    pub fn units(&self) -> Vec<Unit> {
        (0..self.num_units()).map(|index| Unit { index, label: self.unit_label(index) }).collect()
    }

    pub fn unit_index(&self, label: &str) -> Option<usize> {
        (0..self.num_units()).find(|&x| self.unit_label(x) == label)
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Groupoid::Table(_) => true,
            Groupoid::Action(a) => a.group.is_finite(),
            Groupoid::Twist(z) => z.base_groupoid().is_finite(),
        }
    }

    /// Mass of one arrow under the fixed Haar system.
    pub fn fiber_weight(&self) -> f64 {
        match self {
            Groupoid::Table(_) | Groupoid::Action(_) => 1.0,
            Groupoid::Twist(z) => z.base_groupoid().fiber_weight() / z.order() as f64,
        }
    }

    pub fn src(&self, a: &Arrow) -> usize {
        match (self, a) {
            (Groupoid::Table(t), Arrow::Table(i)) => t.src[*i as usize] as usize,
            (Groupoid::Action(_), Arrow::Action { point, .. }) => *point as usize,
            (Groupoid::Twist(z), Arrow::Twist { base, .. }) => z.base_groupoid().src(base),
            _ => panic!("arrow {a:?} does not belong to this groupoid"),
        }
    }

    pub fn tgt(&self, a: &Arrow) -> usize {
        match (self, a) {
            (Groupoid::Table(t), Arrow::Table(i)) => t.tgt[*i as usize] as usize,
            (Groupoid::Action(g), Arrow::Action { point, elem }) => g.act(elem, *point as usize),
            (Groupoid::Twist(z), Arrow::Twist { base, .. }) => z.base_groupoid().tgt(base),
            _ => panic!("arrow {a:?} does not belong to this groupoid"),
        }
    }

    pub fn identity(&self, x: usize) -> Arrow {
        match self {
            Groupoid::Table(_) => Arrow::Table(x as u32),
            Groupoid::Action(g) => Arrow::action(x, g.group.identity()),
            Groupoid::Twist(z) => {
                Arrow::Twist { base: Box::new(z.base_groupoid().identity(x)), turn: 0 }
            }
        }
    }

    pub fn is_identity(&self, a: &Arrow) -> bool {
        *a == self.identity(self.src(a))
    }

    /// True when `a` is a well-formed arrow of this groupoid.
    pub fn contains(&self, a: &Arrow) -> bool {
        match (self, a) {
            (Groupoid::Table(t), Arrow::Table(i)) => (*i as usize) < t.num_arrows(),
            (Groupoid::Action(g), Arrow::Action { point, elem }) => {
                (*point as usize) < g.points.len() && g.group.contains(elem)
            }
            (Groupoid::Twist(z), Arrow::Twist { base, turn }) => {
                *turn < z.order() && z.base_groupoid().contains(base)
            }
            _ => false,
        }
    }

    /// `αβ` when `s(α) = r(β)`.
    pub fn try_compose(&self, a: &Arrow, b: &Arrow) -> Option<Arrow> {
        if self.src(a) != self.tgt(b) {
            return None;
        }
        Some(match (self, a, b) {
            (Groupoid::Table(t), Arrow::Table(i), Arrow::Table(j)) => {
                Arrow::Table(t.compose(*i, *j).expect("composable pair missing from table"))
            }
            (
                Groupoid::Action(g),
                Arrow::Action { elem: e2, .. },
                Arrow::Action { point, elem: e1 },
            ) => Arrow::Action { point: *point, elem: g.group.mul(e2, e1) },
            (Groupoid::Twist(z), _, _) => z.compose(a, b),
            _ => panic!("arrow kind does not match groupoid"),
        })
    }

    pub fn compose(&self, a: &Arrow, b: &Arrow) -> Result<Arrow> {
        self.try_compose(a, b).ok_or_else(|| Error::NotComposable {
            left: self.format_arrow(a),
            right: self.format_arrow(b),
        })
    }

    pub fn invert(&self, a: &Arrow) -> Arrow {
        match (self, a) {
            (Groupoid::Table(t), Arrow::Table(i)) => Arrow::Table(t.inv[*i as usize]),
            (Groupoid::Action(g), Arrow::Action { point, elem }) => Arrow::Action {
                point: g.act(elem, *point as usize) as u32,
                elem: g.group.inverse(elem),
            },
            (Groupoid::Twist(z), _) => z.invert(a),
            _ => panic!("arrow kind does not match groupoid"),
        }
    }

    /// Word length of the group part; `None` on finite backends.
    pub fn word_length(&self, a: &Arrow) -> Option<usize> {
        match (self, a) {
            (Groupoid::Table(_), _) => None,
            (Groupoid::Action(g), Arrow::Action { elem, .. }) => g.group.length(elem),
            (Groupoid::Twist(z), Arrow::Twist { base, .. }) => z.base_groupoid().word_length(base),
            _ => None,
        }
    }

    /// `G_x`, truncated to word length `radius` on infinite backends.
    pub fn source_fiber(&self, x: usize, radius: Option<usize>) -> Result<Vec<Arrow>> {
        if x >= self.num_units() {
            return Err(Error::UnknownUnit(x));
        }
        match self {
            Groupoid::Table(t) => Ok((0..t.num_arrows() as u32)
                .filter(|&i| t.src[i as usize] as usize == x)
                .map(Arrow::Table)
                .collect()),
            Groupoid::Action(g) => {
                let r = if g.group.is_finite() { None } else { Some(radius.ok_or(Error::MissingRadius)?) };
                Ok(g.group.ball(r)?.into_iter().map(|e| Arrow::action(x, e)).collect())
            }
            Groupoid::Twist(z) => {
                let base = z.base_groupoid().source_fiber(x, radius)?;
                Ok(base
                    .into_iter()
                    .flat_map(|b| {
                        (0..z.order()).map(move |k| Arrow::Twist { base: Box::new(b.clone()), turn: k })
                    })
                    .collect())
            }
        }
    }

    /// `G_x^x`, truncated like [`Groupoid::source_fiber`].
    pub fn isotropy(&self, x: usize, radius: Option<usize>) -> Result<Vec<Arrow>> {
        Ok(self.source_fiber(x, radius)?.into_iter().filter(|a| self.tgt(a) == x).collect())
    }

    /// Every arrow of a finite groupoid, fiber by fiber.
    pub fn arrows(&self) -> Result<Vec<Arrow>> {
        if !self.is_finite() {
            return Err(Error::InfiniteBackend);
        }
        self.arrows_within(None)
    }

    /// All arrows of word length at most `radius` (every arrow when finite).
    pub fn arrows_within(&self, radius: Option<usize>) -> Result<Vec<Arrow>> {
        let mut out = Vec::new();
        for x in 0..self.num_units() {
            out.extend(self.source_fiber(x, radius)?);
        }
        Ok(out)
    }

    /// `Orb_G(x)`, the units reachable from `x`, sorted.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        match self {
            Groupoid::Table(t) => {
                let set: BTreeSet<usize> = (0..t.num_arrows())
                    .filter(|&i| t.src[i] as usize == x)
                    .map(|i| t.tgt[i] as usize)
                    .collect();
                set.into_iter().collect()
            }
            Groupoid::Action(g) => {
                let mut seen = vec![false; g.points.len()];
                let mut queue = VecDeque::from([x]);
                seen[x] = true;
                while let Some(y) = queue.pop_front() {
                    for p in g.perms.iter().chain(g.inverse_perms.iter()) {
                        let z = p[y] as usize;
                        if !seen[z] {
                            seen[z] = true;
                            queue.push_back(z);
                        }
                    }
                }
                (0..seen.len()).filter(|&i| seen[i]).collect()
            }
            Groupoid::Twist(z) => z.base_groupoid().orbit(x),
        }
    }

    pub fn format_arrow(&self, a: &Arrow) -> String {
        match (self, a) {
            (Groupoid::Table(t), Arrow::Table(i)) => t.arrow_name(*i).to_string(),
            (Groupoid::Action(g), Arrow::Action { point, elem }) => {
                format!("({}, {})", g.points[*point as usize], g.group.format(elem))
            }
            (Groupoid::Twist(z), Arrow::Twist { base, turn }) => {
                format!("({}, {}/{})", z.base_groupoid().format_arrow(base), turn, z.order())
            }
            _ => format!("{a:?}"),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Groupoid::Table(_) => "finite",
            Groupoid::Action(_) => "transformation",
            Groupoid::Twist(_) => "cyclic-twist",
        }
    }
}

impl fmt::Display for Groupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Groupoid::Table(t) => {
                write!(f, "finite groupoid ({} units, {} arrows)", t.unit_names.len(), t.num_arrows())
            }
            Groupoid::Action(a) => write!(f, "{} points ⋊ {}", a.points.len(), a.group),
            Groupoid::Twist(z) => write!(f, "({})_σ with Z/{} fiber", z.base_groupoid(), z.order()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    fn pair_groupoid() -> Groupoid {
        // units x, y; arrows a: x -> y and its inverse
        let p = |a: &str, b: &str, c: &str| (a.to_string(), b.to_string(), c.to_string());
        let g = TableGroupoid::new(
            vec!["x".into(), "y".into()],
            vec![("a".into(), 0, 1), ("a^-1".into(), 1, 0)],
            &[p("a", "a^-1", "y"), p("a^-1", "a", "x")],
        )
        .unwrap();
        Groupoid::Table(g)
    }

    #[test]
    fn identity_is_a_unit_law() {
        let g = pair_groupoid();
        let a = Arrow::Table(2);
        assert_eq!(g.compose(&g.identity(1), &a).unwrap(), a);
        assert_eq!(g.compose(&a, &g.identity(0)).unwrap(), a);
        assert!(matches!(g.compose(&a, &a), Err(Error::NotComposable { .. })));
        assert_eq!(g.invert(&g.identity(0)), g.identity(0));
    }

    #[test]
    fn missing_products_are_rejected() {
        let r = TableGroupoid::new(
            vec!["x".into(), "y".into()],
            vec![("a".into(), 0, 1), ("b".into(), 1, 0)],
            &[("a".into(), "b".into(), "y".into())],
        );
        assert!(matches!(r, Err(Error::InvalidGroupoid(_))));
    }

    #[test]
    fn pair_groupoid_counts() {
        let g = Groupoid::Table(TableGroupoid::pair(3).unwrap());
        assert_eq!(g.arrows().unwrap().len(), 9);
        assert_eq!(g.source_fiber(1, None).unwrap().len(), 3);
        assert_eq!(g.orbit(2), vec![0, 1, 2]);
        assert_eq!(g.isotropy(0, None).unwrap(), vec![g.identity(0)]);
    }

    #[test]
    fn free_transformation_fibers() {
        let g = Groupoid::Action(
            TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::free(&["a", "b"])).unwrap(),
        );
        assert_eq!(g.source_fiber(0, Some(1)).unwrap().len(), 5);
        assert_eq!(g.source_fiber(0, Some(2)).unwrap().len(), 17);
        assert!(matches!(g.source_fiber(0, None), Err(Error::MissingRadius)));
    }

    #[test]
    fn swap_action_inverts_to_the_image_point() {
        let z2 = GroupSpec::finite(FiniteGroup::cyclic(2));
        let t = TransformationGroupoid::new(
            vec!["p".into(), "q".into()],
            z2.clone(),
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let g = Groupoid::Action(t);
        assert_eq!(g.arrows().unwrap().len(), 4);
        let a = Arrow::action(0, GroupElem::Finite(1));
        let inv = g.invert(&a);
        assert_eq!(inv, Arrow::action(1, GroupElem::Finite(1)));
        assert!(g.is_identity(&g.compose(&inv, &a).unwrap()));
        assert_eq!(g.orbit(0), vec![0, 1]);
        assert!(g.isotropy(0, None).unwrap().len() == 1);
    }

    #[test]
    fn non_homomorphic_actions_are_rejected() {
        let z3 = GroupSpec::finite(FiniteGroup::cyclic(3));
        let r = TransformationGroupoid::new(
            vec!["p".into(), "q".into()],
            z3,
            vec![vec![0, 1], vec![1, 0], vec![1, 0]],
        );
        assert!(matches!(r, Err(Error::NotAHomomorphism(_))));
        let r = TransformationGroupoid::new(vec!["p".into()], GroupSpec::free(&["a"]), vec![vec![1]]);
        assert!(matches!(r, Err(Error::NotAPermutation(_))));
    }
}
