#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistalg::fixtures::random_complex;
use twistalg::AlgebraElement;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[allow(unused_imports)]
pub use twistalg::fixtures::random_ball_element;

pub fn random_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

pub fn dist(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    a.distance(b).unwrap()
}
