//! Standard algebras and random elements used by the test suites and the
//! command line tool.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::algebra::{Algebra, AlgebraElement};
use crate::cocycle::{coboundary, extend_group_cocycle, Cocycle, GroupCocycle};
use crate::group::{FiniteGroup, GroupElem, GroupSpec, LatticePoint, Word};
use crate::groupoid::{Arrow, Groupoid, TableGroupoid, TransformationGroupoid};
use crate::phase::Phase;

fn points(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// `σ(g, g) = −1` on `ℤ/2`.
pub fn sign_cocycle() -> GroupCocycle {
    GroupCocycle::table(
        &FiniteGroup::cyclic(2),
        vec![vec![Phase::ONE, Phase::ONE], vec![Phase::ONE, Phase::turn(1, 2)]],
    )
    .expect("2×2 table")
}

/// `σ(m, n) = (−1)^{m₁n₂}` on the Klein four-group, elements indexed by bits.
pub fn klein_cocycle() -> GroupCocycle {
    let v = (0..4usize)
        .map(|m| (0..4usize).map(|n| if (m & 1) * ((n >> 1) & 1) == 1 { Phase::turn(1, 2) } else { Phase::ONE }).collect())
        .collect();
    GroupCocycle::table(&FiniteGroup::klein_four(), v).expect("4×4 table")
}

pub fn action_algebra(pts: usize, group: FiniteGroup, perms: Vec<Vec<usize>>, sigma: &GroupCocycle) -> Arc<Algebra> {
    let g = Groupoid::Action(TransformationGroupoid::new(points(pts), GroupSpec::finite(group), perms).expect("valid action"));
    let s = extend_group_cocycle(sigma, &g).expect("matching cocycle");
    Algebra::new(g, s)
}

fn trivial_perms(order: usize, pts: usize) -> Vec<Vec<usize>> {
    vec![(0..pts).collect(); order]
}

/// `ℤ/2` acting trivially on `pts` points, with or without the sign cocycle.
pub fn z2(pts: usize, twisted: bool) -> Arc<Algebra> {
    let s = if twisted { sign_cocycle() } else { GroupCocycle::Trivial };
    action_algebra(pts, FiniteGroup::cyclic(2), trivial_perms(2, pts), &s)
}

/// `ℤ/2` swapping two points.
pub fn z2_swap(twisted: bool) -> Arc<Algebra> {
    let s = if twisted { sign_cocycle() } else { GroupCocycle::Trivial };
    action_algebra(2, FiniteGroup::cyclic(2), vec![vec![0, 1], vec![1, 0]], &s)
}

/// The Klein four-group on `pts` points, `a` swapping the first two.
pub fn klein(pts: usize) -> Arc<Algebra> {
    let id: Vec<usize> = (0..pts).collect();
    let mut sw = id.clone();
    if pts >= 2 {
        sw.swap(0, 1);
    }
    action_algebra(pts, FiniteGroup::klein_four(), vec![id.clone(), sw.clone(), id, sw], &klein_cocycle())
}

/// `ℤ/3` rotating three points, with the coboundary of `b(g^k) = turn(k/6)`.
pub fn z3_rotation() -> Arc<Algebra> {
    let g = FiniteGroup::cyclic(3);
    let b = [Phase::ONE, Phase::turn(1, 6), Phase::turn(1, 3)];
    let s = GroupCocycle::table_coboundary(&g, &b).expect("normalized");
    action_algebra(3, g, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], &s)
}

/// `S₃` permuting three of four points, with the coboundary of the given phases.
pub fn s3_on_four(b: &[Phase]) -> Arc<Algebra> {
    let g = FiniteGroup::symmetric3();
    let perms = FiniteGroup::s3_permutations()
        .into_iter()
        .map(|mut p| {
            p.push(3);
            p
        })
        .collect();
    let s = GroupCocycle::table_coboundary(&g, b).expect("normalized");
    action_algebra(4, g, perms, &s)
}

/// The pair groupoid on `n` units with the coboundary of `b`.
pub fn pair(n: usize, b: BTreeMap<Arrow, Phase>) -> Arc<Algebra> {
    let g = Groupoid::Table(TableGroupoid::pair(n).expect("pair groupoid"));
    let s = coboundary(b, &g).expect("normalized");
    Algebra::new(g, s)
}

/// `F_k` on one point.
pub fn free(gens: &[&str]) -> Arc<Algebra> {
    let g = TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::free(gens)).expect("trivial action");
    Algebra::new(Groupoid::Action(g), Cocycle::Trivial)
}

/// `ℤ²` on one point with `σ(m, n) = exp(2πi θ m₁n₂)`.
pub fn torus(theta: Ratio<i64>) -> Arc<Algebra> {
    let g = Groupoid::Action(
        TransformationGroupoid::trivial(vec!["pt".into()], GroupSpec::free_abelian(&["u", "v"])).expect("trivial action"),
    );
    let z = Ratio::from_integer(0);
    let s = GroupCocycle::bilinear(vec![vec![z, theta], vec![z, z]]).expect("square");
    let s = extend_group_cocycle(&s, &g).expect("rank 2");
    Algebra::new(g, s)
}

/// `Σ δ_{s}` over the generators and their inverses of a one-point free or
/// free abelian algebra.
pub fn generator_sum(alg: &Arc<Algebra>) -> AlgebraElement {
    let Groupoid::Action(t) = alg.groupoid() else { panic!("not a transformation groupoid") };
    let k = t.group().num_generators();
    let elems: Vec<GroupElem> = match t.group() {
        GroupSpec::Free(_) => (0..k).flat_map(|i| [false, true].map(|inv| GroupElem::Free(Word::generator(i, inv)))).collect(),
        GroupSpec::FreeAbelian(_) => (0..k)
            .flat_map(|i| {
                [1, -1].map(|s| {
                    let mut v = vec![0; k];
                    v[i] = s;
                    GroupElem::Lattice(LatticePoint::from_slice(&v))
                })
            })
            .collect(),
        GroupSpec::Finite(_) => panic!("finite group"),
    };
    AlgebraElement::new(alg, elems.into_iter().map(|e| (Arrow::action(0, e), Complex64::new(1.0, 0.0))))
        .expect("arrows of the algebra")
}

pub fn random_phase<R: Rng>(rng: &mut R) -> Phase {
    Phase::from_turns_f64(rng.random::<f64>())
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A random element of a finite algebra; each arrow is kept with probability 0.7.
pub fn random_element<R: Rng>(alg: &Arc<Algebra>, rng: &mut R) -> AlgebraElement {
    let arrows = alg.groupoid().arrows().expect("finite algebra");
    let terms: Vec<(Arrow, Complex64)> = arrows
        .into_iter()
        .filter_map(|a| {
            let keep = rng.random_bool(0.7);
            let c = random_complex(rng);
            keep.then_some((a, c))
        })
        .collect();
    AlgebraElement::new(alg, terms).expect("arrows of the algebra")
}

/// A random element supported in the word ball of the given radius; each
/// arrow is kept with probability 1/2.
pub fn random_ball_element<R: Rng>(alg: &Arc<Algebra>, radius: usize, rng: &mut R) -> AlgebraElement {
    let arrows = alg.groupoid().arrows_within(Some(radius)).expect("ball enumeration");
    let terms: Vec<(Arrow, Complex64)> = arrows
        .into_iter()
        .filter_map(|a| {
            let keep = rng.random_bool(0.5);
            let c = random_complex(rng);
            keep.then_some((a, c))
        })
        .collect();
    AlgebraElement::new(alg, terms).expect("arrows of the algebra")
}

pub fn random_self_adjoint<R: Rng>(alg: &Arc<Algebra>, rng: &mut R) -> AlgebraElement {
    let f = random_element(alg, rng);
    f.add(&f.involve()).expect("same parent")
}

/// The deterministic finite fixtures.
pub fn finite_fixtures() -> Vec<(String, Arc<Algebra>)> {
    let b = [
        Phase::ONE,
        Phase::turn(1, 5),
        Phase::from_turns_f64(0.37),
        Phase::turn(3, 4),
        Phase::from_turns_f64(0.81),
        Phase::turn(1, 2),
    ];
    let pair_b: BTreeMap<Arrow, Phase> = [(3u32, Phase::turn(1, 3)), (5, Phase::from_turns_f64(0.29)), (7, Phase::turn(2, 7))]
        .into_iter()
        .map(|(i, p)| (Arrow::Table(i), p))
        .collect();
    vec![
        ("z2-trivial".into(), z2(1, false)),
        ("z2-sign".into(), z2(1, true)),
        ("z2-sign-on-2".into(), z2(2, true)),
        ("z2-swap".into(), z2_swap(false)),
        ("z2-swap-sign".into(), z2_swap(true)),
        ("klein-on-3".into(), klein(3)),
        ("z3-rotation".into(), z3_rotation()),
        ("s3-on-4".into(), s3_on_four(&b)),
        ("pair-3".into(), pair(3, pair_b)),
    ]
}

/// A finite fixture with a randomly drawn cocycle.
pub fn random_finite_fixture<R: Rng>(rng: &mut R) -> (String, Arc<Algebra>) {
    let kinds = ["z2", "z2-swap", "klein", "z3", "s3", "pair"];
    let kind = *kinds.choose(rng).expect("non-empty");
    let alg = match kind {
        "z2" => z2(rng.random_range(1..=3), rng.random_bool(0.5)),
        "z2-swap" => z2_swap(rng.random_bool(0.5)),
        "klein" => klein(rng.random_range(2..=3)),
        "z3" => {
            let g = FiniteGroup::cyclic(3);
            let b = [Phase::ONE, random_phase(rng), random_phase(rng)];
            let s = GroupCocycle::table_coboundary(&g, &b).expect("normalized");
            action_algebra(3, g, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], &s)
        }
        "s3" => {
            let mut b = vec![Phase::ONE];
            b.extend((1..6).map(|_| random_phase(rng)));
            s3_on_four(&b)
        }
        _ => {
            let n = rng.random_range(2..=3);
            let b = (n as u32..(n * n) as u32).map(|i| (Arrow::Table(i), random_phase(rng))).collect();
            pair(n, b)
        }
    };
    (kind.to_string(), alg)
}
