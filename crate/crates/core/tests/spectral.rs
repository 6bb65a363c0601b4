mod common;

use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;
use twistalg::fixtures::{self, finite_fixtures, random_element, random_finite_fixture, random_self_adjoint};
use twistalg::linalg::{hausdorff, multiset_distance};
use twistalg::spectral::{
    gap_report, hermitian_check, l1_radius_upper, reduced_norm_bounds, spectrum_l1_finite,
    spectrum_reduced_finite, GapVerdict,
};

#[test]
fn spectra_agree_on_every_finite_fixture() {
    let mut rng = common::rng(21);
    for (name, alg) in finite_fixtures() {
        for _ in 0..5 {
            let f = random_element(&alg, &mut rng);
            let a = spectrum_l1_finite(&f).unwrap();
            let b = spectrum_reduced_finite(&f).unwrap();
            assert!(hausdorff(&a, &b) <= 1e-8, "{name}");
            let h = random_self_adjoint(&alg, &mut rng);
            assert!(hermitian_check(&h, 1e-8).unwrap().verdict.passed, "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn positive_elements_have_nonnegative_spectrum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, alg) = random_finite_fixture(&mut rng);
        let f = random_element(&alg, &mut rng);
        let ff = f.convolve(&f.involve()).unwrap();
        for z in spectrum_l1_finite(&ff).unwrap() {
            prop_assert!(z.re >= -1e-8 && z.im.abs() <= 1e-8, "{}", z);
        }
    }

    #[test]
    fn squaring_maps_spectra(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, alg) = random_finite_fixture(&mut rng);
        let f = random_element(&alg, &mut rng);
        let sq: Vec<Complex64> = spectrum_l1_finite(&f).unwrap().iter().map(|z| z * z).collect();
        let f2 = spectrum_l1_finite(&f.convolve(&f).unwrap()).unwrap();
        prop_assert!(multiset_distance(&sq, &f2) <= 1e-8);
    }

    #[test]
    fn l1_bounds_dominate_reduced_bounds(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, alg) = random_finite_fixture(&mut rng);
        let f = random_self_adjoint(&alg, &mut rng);
        let l1 = l1_radius_upper(&f, 6, 1 << 20).unwrap();
        let red = reduced_norm_bounds(&f, None).unwrap();
        for e in l1.powers.iter().chain(&l1.dyadic) {
            prop_assert!(e.root >= red.lower - 1e-9);
        }
        prop_assert!(red.lower <= red.upper);
    }
}

#[test]
fn word_backend_bounds_are_ordered() {
    let mut rng = common::rng(5);
    for alg in [fixtures::free(&["a", "b"]), fixtures::torus(Ratio::new(1, 3))] {
        let f = common::random_ball_element(&alg, 1, &mut rng);
        let h = f.add(&f.involve()).unwrap();
        let l1 = l1_radius_upper(&h, 5, 1 << 20).unwrap();
        let red = reduced_norm_bounds(&h, Some(6)).unwrap();
        assert!(red.lower <= red.upper);
        assert!(red.lower <= red.extrapolated && red.extrapolated <= red.upper);
        assert!(l1.best >= red.lower - 1e-9);
        assert_eq!(red.radius, Some(6));
    }
}

#[test]
fn too_small_radius_is_refused() {
    let alg = fixtures::free(&["a", "b"]);
    let s = fixtures::generator_sum(&alg);
    assert!(reduced_norm_bounds(&s, Some(2)).is_err());
    assert!(reduced_norm_bounds(&s, None).is_err());
}

#[test]
fn finite_gap_report_is_consistent_with_equality() {
    let alg = fixtures::s3_on_four(&[twistalg::Phase::ONE; 6]);
    let mut rng = common::rng(8);
    let f = random_self_adjoint(&alg, &mut rng);
    let r = gap_report(&f, 12, None, 1 << 20).unwrap();
    assert!(r.reduced.exact);
    assert!(r.interval.0 <= r.interval.1 + 1e-12);
    assert!(r.spectrum_l1.is_some());
    assert_ne!(r.verdict, GapVerdict::GapCertified);
}

#[test]
fn non_self_adjoint_input_is_refused() {
    let alg = fixtures::z2(1, true);
    let f = twistalg::AlgebraElement::delta(&alg, alg.groupoid().arrows().unwrap()[1].clone()).unwrap();
    assert!(gap_report(&f, 3, None, 1000).is_err());
}

/// `‖hⁿ‖₁` for `h = u + u* + v + v*` in the rotation algebra at `θ`, by dense
/// right multiplication on a grid with `σ(m, l) = exp(2πi θ m₁l₂)`.
fn grid_power_norm(theta: f64, n: usize) -> f64 {
    let size = 2 * n + 1;
    let c = n as i64;
    let mut f = vec![Complex64::new(0.0, 0.0); size * size];
    f[n * size + n] = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let mut out = vec![Complex64::new(0.0, 0.0); size * size];
        for i in 0..size {
            for j in 0..size {
                let v = f[i * size + j];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (l1, l2) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let (m1, m2) = (i as i64 - c, j as i64 - c);
                    let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * theta * (m1 * l2) as f64);
                    let (a, b) = ((m1 + l1 + c) as usize, (m2 + l2 + c) as usize);
                    out[a * size + b] += v * phase;
                }
            }
        }
        f = out;
    }
    f.iter().map(|z| z.norm()).sum()
}

#[test]
fn dyadic_bounds_match_a_grid_computation() {
    for q in [3i64, 4] {
        let alg = fixtures::torus(Ratio::new(1, q));
        let h = fixtures::generator_sum(&alg);
        let l1 = l1_radius_upper(&h, 14, 1 << 20).unwrap();
        assert_eq!(l1.dyadic.iter().map(|e| e.n).collect::<Vec<_>>(), vec![16, 32, 64]);
        for e in &l1.dyadic {
            let oracle = grid_power_norm(1.0 / q as f64, e.n).powf(1.0 / e.n as f64);
            assert!((e.root - oracle).abs() <= 1e-9 * oracle, "q = {q}, n = {}: {} vs {oracle}", e.n, e.root);
        }
        assert!(l1.best < l1.powers.last().unwrap().root);
    }
}

#[test]
fn dyadic_bounds_stay_above_the_spectral_radius_on_finite_fixtures() {
    let mut rng = common::rng(21);
    for (name, alg) in fixtures::finite_fixtures() {
        let f = random_element(&alg, &mut rng);
        let radius = spectrum_l1_finite(&f).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let l1 = l1_radius_upper(&f, 4, 1 << 20).unwrap();
        assert_eq!(l1.dyadic.last().map(|e| e.n), Some(1 << 20), "{name}");
        for e in &l1.dyadic {
            assert!(e.root >= radius - 1e-9, "{name}: {} < {radius}", e.root);
        }
        assert!((l1.dyadic.last().unwrap().root - radius).abs() < 1e-3 * radius.max(1.0), "{name}");
    }
}
