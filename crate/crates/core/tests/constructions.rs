mod common;

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use twistalg::constructions::counterexample::{free_counterexample, free_element, free_algebra};
use twistalg::constructions::genl1::{phi_map, GenL1Context, GenL1Element};
use twistalg::constructions::lift::{isotropy_lift, spectrum_isotropy};
use twistalg::constructions::ztwist::{build_z_twist, check_gamma_sigma, embed_j, gamma_sigma};
use twistalg::fixtures::{self, random_complex, random_element, random_finite_fixture};
use twistalg::group::{FiniteGroup, GroupElem};
use twistalg::linalg::one_sided_distance;
use twistalg::spectral::spectrum_l1_finite;
use twistalg::{Algebra, AlgebraElement, Arrow, Error, Groupoid, Phase};

use common::dist;

fn check_embedding(base: &Arc<Algebra>, n: u32, draws: usize, elem: impl Fn(&mut rand_chacha::ChaCha8Rng) -> AlgebraElement) {
    let tw = build_z_twist(base, n).unwrap();
    let mut rng = common::rng(n as u64 * 31);
    for _ in 0..draws {
        let f = elem(&mut rng);
        let h = elem(&mut rng);
        let (jf, jh) = (embed_j(&f, &tw).unwrap(), embed_j(&h, &tw).unwrap());
        assert!((jf.i_norm() - f.i_norm()).abs() <= 1e-10);
        let prod = embed_j(&f.convolve(&h).unwrap(), &tw).unwrap();
        assert!(dist(&prod, &jf.convolve(&jh).unwrap()) <= 1e-10);
        assert!(dist(&embed_j(&f.involve(), &tw).unwrap(), &jf.involve()) <= 1e-10);
    }
}

#[test]
fn j_is_an_isometric_star_homomorphism() {
    let z2 = fixtures::z2(2, true);
    check_embedding(&z2, 2, 100, |r| random_element(&z2, r));
    let torus = fixtures::torus(Ratio::new(1, 2));
    check_embedding(&torus, 2, 100, |r| common::random_ball_element(&torus, 2, r));
    let z3 = fixtures::z3_rotation();
    check_embedding(&z3, 6, 20, |r| random_element(&z3, r));
}

#[test]
fn twist_rejects_incompatible_orders() {
    assert!(matches!(build_z_twist(&fixtures::z2(1, true), 3), Err(Error::NotRootOfUnity(_))));
    assert!(build_z_twist(&fixtures::torus(Ratio::new(1, 3)), 2).is_err());
    let f = AlgebraElement::unit_element(&fixtures::z2(1, true));
    let tw = build_z_twist(&fixtures::z2(1, true), 2).unwrap();
    assert!(embed_j(&f, &tw).is_err());
}

#[test]
fn twisted_unit_is_neutral() {
    let base = fixtures::klein(2);
    let tw = build_z_twist(&base, 2).unwrap();
    let u = AlgebraElement::unit_element(&tw);
    let mut rng = common::rng(4);
    let f = embed_j(&random_element(&base, &mut rng), &tw).unwrap();
    assert!(dist(&u.convolve(&f).unwrap(), &f) <= 1e-12);
    assert!(dist(&f.convolve(&u).unwrap(), &f) <= 1e-12);
}

#[test]
fn gamma_sigma_matches_the_twisted_groupoid() {
    for (base, n) in [(fixtures::z2(3, true), 2), (fixtures::klein(3), 2), (fixtures::z3_rotation(), 6)] {
        let tw = build_z_twist(&base, n).unwrap();
        let check = check_gamma_sigma(&tw).unwrap();
        assert!(check.passed(), "{check:?}");
    }
    // ℤ/2 with the sign cocycle untwists to ℤ/4
    let g = gamma_sigma(&FiniteGroup::cyclic(2), &fixtures::sign_cocycle(), 2).unwrap();
    let orders: Vec<usize> = (0..4u16)
        .map(|a| (1..=4).find(|&k| (0..k).fold(g.identity(), |acc, _| g.mul(acc, a)) == g.identity()).unwrap())
        .collect();
    assert_eq!(orders.iter().max(), Some(&4));
}

fn random_genl1<R: Rng>(ctx: &Arc<GenL1Context>, rng: &mut R) -> GenL1Element {
    let coeffs = (0..ctx.group().order())
        .map(|_| (0..ctx.num_points()).map(|_| if rng.random_bool(0.7) { random_complex(rng) } else { Complex64::default() }).collect())
        .collect();
    GenL1Element::new(ctx, coeffs).unwrap()
}

#[test]
fn phi_is_a_contractive_star_homomorphism() {
    let b: Vec<Phase> = (0..6).map(|k| Phase::turn(k, 6)).collect();
    for alg in [fixtures::z2(3, true), fixtures::z2_swap(true), fixtures::s3_on_four(&b)] {
        let ctx = GenL1Context::from_algebra(&alg).unwrap();
        let mut rng = common::rng(17);
        for _ in 0..100 {
            let f = random_genl1(&ctx, &mut rng);
            let h = random_genl1(&ctx, &mut rng);
            let (pf, ph) = (phi_map(&f, &alg).unwrap(), phi_map(&h, &alg).unwrap());
            let prod = phi_map(&f.convolve(&h).unwrap(), &alg).unwrap();
            assert!(dist(&prod, &pf.convolve(&ph).unwrap()) <= 1e-10);
            assert!(dist(&phi_map(&f.involve(), &alg).unwrap(), &pf.involve()) <= 1e-10);
            assert!(pf.i_norm() <= f.norm() + 1e-12);
        }
        let phi: Vec<Complex64> = (0..ctx.num_points()).map(|x| Complex64::new(x as f64 + 1.0, -0.5)).collect();
        for gamma in 0..ctx.group().order() as u16 {
            let pm = phi_map(&GenL1Element::point_mass(&ctx, gamma, &phi).unwrap(), &alg).unwrap();
            for (x, c) in phi.iter().enumerate() {
                assert_eq!(pm.coeff(&Arrow::action(x, GroupElem::Finite(gamma))), *c);
            }
        }
    }
}

#[test]
fn phi_is_isometric_over_a_point() {
    let alg = fixtures::s3_on_four(&[Phase::ONE; 6]);
    let Groupoid::Action(t) = alg.groupoid() else { panic!() };
    let one = twistalg::groupoid::TransformationGroupoid::trivial(vec!["pt".into()], t.group().clone()).unwrap();
    let alg = Algebra::new(Groupoid::Action(one), twistalg::Cocycle::Trivial);
    let ctx = GenL1Context::from_algebra(&alg).unwrap();
    let mut rng = common::rng(23);
    for _ in 0..100 {
        let f = random_genl1(&ctx, &mut rng);
        assert!((phi_map(&f, &alg).unwrap().i_norm() - f.norm()).abs() <= 1e-12);
    }
}

#[test]
fn isotropy_lift_includes_the_isotropy_spectrum() {
    let mut rng = common::rng(99);
    let mut done = 0;
    while done < 50 {
        let (name, alg) = random_finite_fixture(&mut rng);
        if !matches!(alg.groupoid(), Groupoid::Action(_)) {
            continue;
        }
        let x = rng.random_range(0..alg.groupoid().num_units());
        let iso = alg.groupoid().isotropy(x, None).unwrap();
        let f = AlgebraElement::new(&alg, iso.into_iter().map(|a| (a, random_complex(&mut rng)))).unwrap();
        let f = f.add(&f.involve()).unwrap();
        let lifted = isotropy_lift(&f, x).unwrap();
        let small = spectrum_isotropy(&f, x).unwrap();
        let big = spectrum_l1_finite(&lifted).unwrap();
        assert!(one_sided_distance(&small, &big) <= 1e-8, "{name} at {x}");
        done += 1;
    }
}

#[test]
fn counterexample_powers_have_norm_one() {
    let a = [1.0, 1.0, -1.0].map(|v| Complex64::new(v / 3.0, 0.0));
    let f = free_element(&free_algebra(), &a).unwrap();
    for e in f.power_seq(8, 1 << 20).unwrap() {
        assert!((e.norm - 1.0).abs() <= 1e-12);
        assert_eq!(e.terms, 3usize.pow(e.n as u32));
    }
    let w = Complex64::from_polar(1.0 / 3.0, 0.4);
    let r = free_counterexample([a[0], w, a[2]], 5, 6, 1 << 20).unwrap();
    assert!(r.sup_t < 1.0 && r.reduced_lower <= r.sup_t_upper);
}
