//! Discrete groups used as the acting group of transformation groupoids.
//!
//! Three kinds are supported: finite groups given by a multiplication table,
//! free groups on `k` generators (elements are reduced words) and free abelian
//! groups of rank `d` (elements are exponent vectors). All orders used for
//! enumeration are graded: first by word length, then lexicographically.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A reduced word in a free group. Letters are `±(g + 1)` for generator `g`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(SmallVec<[i8; 24]>);

fn letter_rank(l: i8) -> u8 {
    let g = l.unsigned_abs() - 1;
    2 * g + u8::from(l < 0)
}

impl Word {
    pub fn identity() -> Self {
        Word(SmallVec::new())
    }

    pub fn generator(g: usize, inverse: bool) -> Self {
        let l = (g + 1) as i8;
        Word(SmallVec::from_slice(&[if inverse { -l } else { l }]))
    }

    /// Builds a word from raw letters, freely reducing as it goes.
    pub fn from_letters(letters: &[i8]) -> Self {
        let mut w = Word::identity();
        for &l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: i8) {
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn letters(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        // cancel the longest suffix of self against the prefix of other
        let a = &self.0;
        let b = &other.0;
        let mut k = 0;
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == -b[k] {
            k += 1;
        }
        let mut out = SmallVec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a[..a.len() - k]);
        out.extend_from_slice(&b[k..]);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            self.0
                .iter()
                .map(|&l| letter_rank(l))
                .cmp(other.0.iter().map(|&l| letter_rank(l)))
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of a free abelian group, as an exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LatticePoint(SmallVec<[i32; 4]>);

impl LatticePoint {
    pub fn zero(rank: usize) -> Self {
        LatticePoint(SmallVec::from_elem(0, rank))
    }

    pub fn from_slice(v: &[i32]) -> Self {
        LatticePoint(SmallVec::from_slice(v))
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn l1(&self) -> usize {
        self.0.iter().map(|c| c.unsigned_abs() as usize).sum()
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }
}

impl Ord for LatticePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.l1().cmp(&other.l1()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LatticePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A group element of any supported kind.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum GroupElem {
    Finite(u16),
    Free(Word),
    Lattice(LatticePoint),
}

/// A finite group stored as a full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<u16>,
    identity: u16,
    inverses: Vec<u16>,
}

impl FiniteGroup {
    /// Validates the group axioms exhaustively. `table[i][j]` is `names[i] * names[j]`.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::InvalidGroup(format!("order {n} unsupported")));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup("table must be square with one row per element".into()));
        }
        if let Some(bad) = table.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::InvalidGroup(format!("entry {bad} out of range")));
        }
        let flat: Vec<u16> = table.iter().flatten().map(|&v| v as u16).collect();
        let at = |i: usize, j: usize| flat[i * n + j] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("{} has no inverse", names[g])))?;
            inverses.push(inv as u16);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup { names, table: flat, identity: identity as u16, inverses })
    }

    /// The group generated as the closure of a list of permutations that is
    /// already closed under composition. `(στ)(i) = σ(τ(i))`.
    pub fn from_permutations(names: Vec<String>, perms: &[Vec<usize>]) -> Result<Self> {
        let index: HashMap<&[usize], usize> =
            perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let mut table = vec![vec![0; perms.len()]; perms.len()];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let pq: Vec<usize> = q.iter().map(|&k| p[k]).collect();
                table[i][j] = *index
                    .get(pq.as_slice())
                    .ok_or_else(|| Error::InvalidGroup("permutation list not closed".into()))?;
            }
        }
        FiniteGroup::from_table(names, table)
    }

    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| if k == 0 { "e".to_string() } else { format!("g{k}") }).collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::from_table(names, table).expect("cyclic group table")
    }

    /// `Z/2 x Z/2` with elements e, a, b, ab.
    pub fn klein_four() -> Self {
        let names = ["e", "a", "b", "ab"].map(String::from).to_vec();
        let table = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
        FiniteGroup::from_table(names, table).expect("klein table")
    }

    /// The symmetric group on three letters, as permutations of {0, 1, 2}.
    pub fn symmetric3() -> Self {
        let perms = Self::s3_permutations();
        let names = ["e", "r", "r2", "s", "sr", "sr2"].map(String::from).to_vec();
        FiniteGroup::from_permutations(names, &perms).expect("S3 table")
    }

    /// The permutations of {0, 1, 2} in the order used by [`FiniteGroup::symmetric3`].
    pub fn s3_permutations() -> Vec<Vec<usize>> {
        vec![
            vec![0, 1, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![2, 1, 0],
        ]
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> u16 {
        self.identity
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.table[a as usize * self.order() + b as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        self.inverses[a as usize]
    }

    pub fn name(&self, a: u16) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    /// Row-major table of element indices.
    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|i| (0..n).map(|j| self.table[i * n + j] as usize).collect()).collect()
    }
}

/// The acting group of a transformation groupoid.
#[derive(Clone, Debug)]
pub enum GroupSpec {
    Finite(Arc<FiniteGroup>),
    Free(Arc<[String]>),
    FreeAbelian(Arc<[String]>),
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GroupSpec::Finite(a), GroupSpec::Finite(b)) => Arc::ptr_eq(a, b) || a == b,
            (GroupSpec::Free(a), GroupSpec::Free(b)) => a == b,
            (GroupSpec::FreeAbelian(a), GroupSpec::FreeAbelian(b)) => a == b,
            _ => false,
        }
    }
}

impl GroupSpec {
    pub fn free(generators: &[&str]) -> Self {
        GroupSpec::Free(generators.iter().map(|s| s.to_string()).collect())
    }

    pub fn free_abelian(generators: &[&str]) -> Self {
        GroupSpec::FreeAbelian(generators.iter().map(|s| s.to_string()).collect())
    }

    pub fn finite(group: FiniteGroup) -> Self {
        GroupSpec::Finite(Arc::new(group))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupSpec::Finite(_))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupSpec::Finite(_) => "finite",
            GroupSpec::Free(_) => "free",
            GroupSpec::FreeAbelian(_) => "free-abelian",
        }
    }

    /// Number of generators (free kinds) or of elements (finite).
    pub fn num_generators(&self) -> usize {
        match self {
            GroupSpec::Finite(g) => g.order(),
            GroupSpec::Free(gens) | GroupSpec::FreeAbelian(gens) => gens.len(),
        }
    }

    pub fn generator_names(&self) -> &[String] {
        match self {
            GroupSpec::Finite(g) => g.names(),
            GroupSpec::Free(gens) | GroupSpec::FreeAbelian(gens) => gens,
        }
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            GroupSpec::Finite(g) => GroupElem::Finite(g.identity()),
            GroupSpec::Free(_) => GroupElem::Free(Word::identity()),
            GroupSpec::FreeAbelian(gens) => GroupElem::Lattice(LatticePoint::zero(gens.len())),
        }
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (self, a, b) {
            (GroupSpec::Finite(g), GroupElem::Finite(x), GroupElem::Finite(y)) => {
                GroupElem::Finite(g.mul(*x, *y))
            }
            (GroupSpec::Free(_), GroupElem::Free(x), GroupElem::Free(y)) => GroupElem::Free(x.mul(y)),
            (GroupSpec::FreeAbelian(_), GroupElem::Lattice(x), GroupElem::Lattice(y)) => {
                GroupElem::Lattice(x.add(y))
            }
            _ => panic!("group element kind does not match group"),
        }
    }

    pub fn inverse(&self, a: &GroupElem) -> GroupElem {
        match (self, a) {
            (GroupSpec::Finite(g), GroupElem::Finite(x)) => GroupElem::Finite(g.inv(*x)),
            (GroupSpec::Free(_), GroupElem::Free(w)) => GroupElem::Free(w.inverse()),
            (GroupSpec::FreeAbelian(_), GroupElem::Lattice(m)) => GroupElem::Lattice(m.neg()),
            _ => panic!("group element kind does not match group"),
        }
    }

    pub fn is_identity(&self, a: &GroupElem) -> bool {
        *a == self.identity()
    }

    /// True when `a` is a well-formed element of this group.
    pub fn contains(&self, a: &GroupElem) -> bool {
        match (self, a) {
            (GroupSpec::Finite(g), GroupElem::Finite(x)) => (*x as usize) < g.order(),
            (GroupSpec::Free(gens), GroupElem::Free(w)) => {
                w.letters().iter().all(|&l| l != 0 && (l.unsigned_abs() as usize) <= gens.len())
                    && w.letters().windows(2).all(|p| p[0] != -p[1])
            }
            (GroupSpec::FreeAbelian(gens), GroupElem::Lattice(m)) => m.coords().len() == gens.len(),
            _ => false,
        }
    }

    /// Word length with respect to the standard generators; `None` for finite groups.
    pub fn length(&self, a: &GroupElem) -> Option<usize> {
        match a {
            GroupElem::Finite(_) => None,
            GroupElem::Free(w) => Some(w.len()),
            GroupElem::Lattice(m) => Some(m.l1()),
        }
    }

    /// All elements (finite) or the word ball of radius `r`, in graded order.
    pub fn ball(&self, radius: Option<usize>) -> Result<Vec<GroupElem>> {
        match self {
            GroupSpec::Finite(g) => Ok((0..g.order() as u16).map(GroupElem::Finite).collect()),
            GroupSpec::Free(gens) => {
                let r = radius.ok_or(Error::MissingRadius)?;
                Ok(free_ball(gens.len(), r).into_iter().map(GroupElem::Free).collect())
            }
            GroupSpec::FreeAbelian(gens) => {
                let r = radius.ok_or(Error::MissingRadius)?;
                Ok(lattice_ball(gens.len(), r).into_iter().map(GroupElem::Lattice).collect())
            }
        }
    }

    pub fn format(&self, a: &GroupElem) -> String {
        match (self, a) {
            (GroupSpec::Finite(g), GroupElem::Finite(x)) => g.name(*x).to_string(),
            (GroupSpec::Free(gens), GroupElem::Free(w)) => {
                if w.is_empty() {
                    return "e".into();
                }
                w.letters()
                    .iter()
                    .map(|&l| {
                        let name = &gens[l.unsigned_abs() as usize - 1];
                        if l < 0 {
                            format!("{name}^-1")
                        } else {
                            name.clone()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            (GroupSpec::FreeAbelian(gens), GroupElem::Lattice(m)) => {
                let parts: Vec<String> = m
                    .coords()
                    .iter()
                    .zip(gens.iter())
                    .filter(|(c, _)| **c != 0)
                    .map(|(c, n)| if *c == 1 { n.clone() } else { format!("{n}^{c}") })
                    .collect();
                if parts.is_empty() {
                    "e".into()
                } else {
                    parts.join(" ")
                }
            }
            _ => format!("{a:?}"),
        }
    }

    /// Parses `a b^-1 a`, `a^3`, `e`, or a finite element name.
    pub fn parse(&self, text: &str) -> std::result::Result<GroupElem, String> {
        let text = text.trim();
        match self {
            GroupSpec::Finite(g) => {
                if let Some(x) = g.index_of(text) {
                    return Ok(GroupElem::Finite(x));
                }
                let mut acc = g.identity();
                for tok in text.split_whitespace() {
                    let (name, exp) = match tok.split_once('^') {
                        Some((n, e)) => {
                            (n, e.parse::<i64>().map_err(|_| format!("bad exponent in `{tok}`"))?)
                        }
                        None => (tok, 1),
                    };
                    let mut x = match g.index_of(name) {
                        Some(x) => x,
                        None if name == "e" || name == "1" => g.identity(),
                        None => return Err(format!("undeclared group element `{name}`")),
                    };
                    if exp < 0 {
                        x = g.inv(x);
                    }
                    for _ in 0..exp.unsigned_abs() % g.order() as u64 {
                        acc = g.mul(acc, x);
                    }
                }
                Ok(GroupElem::Finite(acc))
            }
            GroupSpec::Free(gens) | GroupSpec::FreeAbelian(gens) => {
                let mut letters: Vec<(usize, i64)> = Vec::new();
                for tok in text.split_whitespace() {
                    if tok == "e" || tok == "1" {
                        continue;
                    }
                    let (name, exp) = match tok.split_once('^') {
                        Some((n, e)) => {
                            (n, e.parse::<i64>().map_err(|_| format!("bad exponent in `{tok}`"))?)
                        }
                        None => (tok, 1),
                    };
                    let g = gens
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| format!("undeclared generator `{name}`"))?;
                    letters.push((g, exp));
                }
                if let GroupSpec::Free(_) = self {
                    let mut raw = Vec::new();
                    for (g, e) in letters {
                        let l = (g + 1) as i8;
                        for _ in 0..e.unsigned_abs() {
                            raw.push(if e < 0 { -l } else { l });
                        }
                    }
                    Ok(GroupElem::Free(Word::from_letters(&raw)))
                } else {
                    let mut v = vec![0i32; gens.len()];
                    for (g, e) in letters {
                        v[g] += e as i32;
                    }
                    Ok(GroupElem::Lattice(LatticePoint::from_slice(&v)))
                }
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Finite(g) => write!(f, "finite group of order {}", g.order()),
            GroupSpec::Free(gens) => write!(f, "free group on {}", gens.join(",")),
            GroupSpec::FreeAbelian(gens) => write!(f, "free abelian group on {}", gens.join(",")),
        }
    }
}

/// Reduced words of length at most `r` on `k` generators, graded-lexicographic.
pub fn free_ball(k: usize, r: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut level = vec![Word::identity()];
    let letters: Vec<i8> = (0..k as i8).flat_map(|g| [g + 1, -(g + 1)]).collect();
    for _ in 0..r {
        let mut next = Vec::with_capacity(level.len() * (2 * k).saturating_sub(1).max(1));
        for w in &level {
            for &l in &letters {
                if w.0.last() == Some(&-l) {
                    continue;
                }
                let mut nw = w.clone();
                nw.0.push(l);
                next.push(nw);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Exponent vectors with l1 norm at most `r`, graded then lexicographic.
pub fn lattice_ball(d: usize, r: usize) -> Vec<LatticePoint> {
    fn sphere(d: usize, n: usize, prefix: &mut Vec<i32>, out: &mut Vec<LatticePoint>) {
        if d == 0 {
            if n == 0 {
                out.push(LatticePoint::from_slice(prefix));
            }
            return;
        }
        let n = n as i32;
        for c in -n..=n {
            prefix.push(c);
            sphere(d - 1, (n - c.abs()) as usize, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for n in 0..=r {
        let mut level = Vec::new();
        if d == 0 {
            if n == 0 {
                level.push(LatticePoint::zero(0));
            }
        } else {
            sphere(d, n, &mut Vec::with_capacity(d), &mut level);
        }
        level.sort();
        out.extend(level);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_word_cancellation() {
        let g = GroupSpec::free(&["a", "b"]);
        let ab = g.parse("a b").unwrap();
        let binv = g.parse("b^-1").unwrap();
        assert_eq!(g.mul(&ab, &binv), g.parse("a").unwrap());
        assert_eq!(g.format(&g.parse("a^2 b^-1").unwrap()), "a a b^-1");
    }

    #[test]
    fn free_ball_sizes() {
        assert_eq!(free_ball(2, 1).len(), 5);
        assert_eq!(free_ball(2, 2).len(), 17);
        // 1 + 2k * sum (2k-1)^(n-1)
        assert_eq!(free_ball(2, 4).len(), 1 + 4 * (1 + 3 + 9 + 27));
        let b = free_ball(2, 3);
        assert!(b.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn lattice_ball_is_a_diamond() {
        for r in 0..6 {
            assert_eq!(lattice_ball(2, r).len(), 2 * r * r + 2 * r + 1);
        }
        let b = lattice_ball(3, 3);
        assert!(b.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn finite_tables_are_checked() {
        let bad = FiniteGroup::from_table(vec!["e".into(), "g".into()], vec![vec![0, 1], vec![1, 1]]);
        assert!(matches!(bad, Err(Error::InvalidGroup(_))));
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.order(), 6);
        let r = s3.index_of("r").unwrap();
        assert_eq!(s3.mul(r, s3.mul(r, r)), s3.identity());
    }

    #[test]
    fn parse_rejects_undeclared_generator() {
        let g = GroupSpec::free(&["a", "b"]);
        assert!(g.parse("a c").unwrap_err().contains("`c`"));
    }
}
