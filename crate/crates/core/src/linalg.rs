//! Sparse and dense complex linear algebra used by the representation and
//! spectral layers.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest dimension routed to dense factorizations.
pub const DENSE_LIMIT: usize = 512;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Compressed sparse row matrix, stored together with its conjugate transpose.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<Complex64>,
    adj: Option<Box<CsrMatrix>>,
}

fn build_csr(rows: usize, cols: usize, mut trip: Vec<(u32, u32, Complex64)>) -> CsrMatrix {
    trip.sort_by_key(|&(r, c, _)| (r, c));
    let mut indptr = vec![0usize; rows + 1];
    let mut indices = Vec::with_capacity(trip.len());
    let mut data: Vec<Complex64> = Vec::with_capacity(trip.len());
    let mut last: Option<(u32, u32)> = None;
    for (r, c, v) in trip {
        if last == Some((r, c)) {
            *data.last_mut().unwrap() += v;
            continue;
        }
        last = Some((r, c));
        indices.push(c);
        data.push(v);
        indptr[r as usize + 1] += 1;
    }
    for i in 0..rows {
        indptr[i + 1] += indptr[i];
    }
    CsrMatrix { rows, cols, indptr, indices, data, adj: None }
}

impl CsrMatrix {
    /// Duplicate entries are summed.
    pub fn from_triplets(rows: usize, cols: usize, trip: Vec<(u32, u32, Complex64)>) -> Self {
        let adj_trip = trip.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        let mut m = build_csr(rows, cols, trip);
        m.adj = Some(Box::new(build_csr(cols, rows, adj_trip)));
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n as u32).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        match self.indices[lo..hi].binary_search(&(c as u32)) {
            Ok(k) => self.data[lo + k],
            Err(_) => ZERO,
        }
    }

    /// Entries of row `r` as `(column, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[lo..hi].iter().zip(&self.data[lo..hi]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn adjoint(&self) -> &CsrMatrix {
        self.adj.as_deref().expect("adjoint is built with the matrix")
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![ZERO; self.rows];
        let body = |(r, yr): (usize, &mut Complex64)| {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k] as usize];
            }
            *yr = acc;
        };
        if self.nnz() > 1 << 15 {
            y.par_iter_mut().enumerate().for_each(body);
        } else {
            y.iter_mut().enumerate().for_each(body);
        }
        y
    }

    /// `M^H x`.
    pub fn matvec_adj(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.adjoint().matvec(x)
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::<Complex64>::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Largest absolute row sum, the ℓ^∞ operator norm.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.rows).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest absolute column sum, the ℓ¹ operator norm.
    pub fn max_col_sum(&self) -> f64 {
        self.adjoint().max_row_sum()
    }

    /// `max |A - B|` entrywise.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - other.get(r, c)).norm());
            }
            for (c, v) in other.row(r) {
                worst = worst.max((v - self.get(r, c)).norm());
            }
        }
        worst
    }
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_p(x: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub fn pairing(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvdMethod {
    Dense,
    Lanczos { iterations: usize },
}

/// Largest singular value. `value` is exact up to the dense solver's accuracy,
/// or for the Lanczos path a lower bound realized by an explicit vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularEstimate {
    pub value: f64,
    pub method: SvdMethod,
}

pub fn top_singular_value(m: &CsrMatrix) -> Result<SingularEstimate> {
    if m.rows == 0 || m.cols == 0 || m.nnz() == 0 {
        return Ok(SingularEstimate { value: 0.0, method: SvdMethod::Dense });
    }
    if m.rows.max(m.cols) <= DENSE_LIMIT {
        let s = m
            .to_dense()
            .singular_values()
            .map_err(|e| Error::InvalidArgument(format!("SVD failed: {e:?}")))?;
        return Ok(SingularEstimate { value: s.first().copied().unwrap_or(0.0), method: SvdMethod::Dense });
    }
    Ok(lanczos_top_singular(m, 0x5eed, 160, 4))
}

fn random_unit(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let s = norm2(&v);
    v.iter_mut().for_each(|z| *z /= s);
    v
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi += xi * a);
}

/// Largest eigenvalue and eigenvector of a symmetric tridiagonal matrix.
fn tridiag_top(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = Mat::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let evd = t.self_adjoint_eigen(faer::Side::Lower).expect("tridiagonal eigensolver");
    let s = evd.S();
    let u = evd.U();
    let mut best = 0;
    for i in 0..k {
        if s[i] > s[best] {
            best = i;
        }
    }
    (s[best], (0..k).map(|i| u[(i, best)]).collect())
}

/// Runs `steps` Lanczos steps on `M^H M` from `start`. Returns the
/// recurrence coefficients and, when `combine` is given, `Σ combine_j v_j`.
fn lanczos_pass(
    m: &CsrMatrix,
    start: &[Complex64],
    steps: usize,
    combine: Option<&[f64]>,
) -> (Vec<f64>, Vec<f64>, Option<Vec<Complex64>>) {
    let n = m.cols;
    let mut v_prev = vec![ZERO; n];
    let mut v = start.to_vec();
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut acc = combine.map(|_| vec![ZERO; n]);
    for j in 0..steps {
        if let (Some(c), Some(acc)) = (combine, acc.as_mut()) {
            axpy(acc, c[j], &v);
        }
        let mut w = m.matvec_adj(&m.matvec(&v));
        if j > 0 {
            axpy(&mut w, -beta[j - 1], &v_prev);
        }
        let a = pairing(&w, &v).re;
        axpy(&mut w, -a, &v);
        alpha.push(a);
        let b = norm2(&w);
        if j + 1 == steps || b <= 1e-14 * a.abs().max(1.0) {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|z| *z /= b);
        v_prev = std::mem::replace(&mut v, w);
    }
    beta.truncate(alpha.len().saturating_sub(1));
    (alpha, beta, acc)
}

/// Top singular value by restarted Lanczos on `M^H M`. The returned value is
/// `‖Mv‖/‖v‖` for the final Ritz vector `v`.
pub fn lanczos_top_singular(m: &CsrMatrix, seed: u64, steps: usize, restarts: usize) -> SingularEstimate {
    let mut start = random_unit(m.cols, seed);
    let mut best = 0.0f64;
    let mut iterations = 0;
    for _ in 0..restarts.max(1) {
        let (alpha, beta, _) = lanczos_pass(m, &start, steps, None);
        let k = alpha.len();
        let (theta, y) = tridiag_top(&alpha, &beta);
        let (_, _, ritz) = lanczos_pass(m, &start, k, Some(&y));
        let ritz = ritz.expect("combination requested");
        iterations += 2 * k;
        let nv = norm2(&ritz);
        if nv == 0.0 {
            break;
        }
        let value = norm2(&m.matvec(&ritz)) / nv;
        let improved = value > best * (1.0 + 1e-13);
        best = best.max(value);
        start = ritz.iter().map(|z| z / nv).collect();
        if !improved || (theta.max(0.0).sqrt() - value).abs() <= 1e-11 * value.max(1.0) {
            break;
        }
    }
    SingularEstimate { value: best, method: SvdMethod::Lanczos { iterations } }
}

/// Eigenvalues of a dense square complex matrix.
pub fn eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.eigenvalues().map_err(|e| Error::InvalidArgument(format!("eigensolver failed: {e:?}")))
}

/// Sorts a spectrum by real part, then imaginary part.
pub fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// `sup_{a ∈ A} dist(a, B)`.
pub fn one_sided_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_sided_distance(a, b).max(one_sided_distance(b, a))
}

/// Greedy nearest matching of two multisets; returns the worst matched
/// distance, or infinity when the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut pick = None;
        let mut d = f64::INFINITY;
        for (j, y) in b.iter().enumerate() {
            if !used[j] && (x - y).norm() < d {
                d = (x - y).norm();
                pick = Some(j);
            }
        }
        used[pick.expect("sizes match")] = true;
        worst = worst.max(d);
    }
    worst
}

/// `x ↦ |x|^{p-1} sgn(x)`, the duality map of ℓ^p up to normalization.
fn duality_map(x: &[Complex64], p: f64) -> Vec<Complex64> {
    x.iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                ZERO
            } else {
                z / r * r.powf(p - 1.0)
            }
        })
        .collect()
}

/// Certified lower bound for `‖M‖_{p→p}` by Boyd's fixed-point iteration from
/// several starting vectors. Every candidate ratio is computed explicitly.
pub fn p_norm_lower(m: &CsrMatrix, p: f64, trials: usize, iters: usize, seed: u64) -> f64 {
    assert!(p > 1.0 && p.is_finite());
    let q = p / (p - 1.0);
    let n = m.cols;
    if n == 0 || m.nnz() == 0 {
        return 0.0;
    }
    let mut starts: Vec<Vec<Complex64>> = Vec::new();
    // basis vectors at the heaviest columns
    let adj = m.adjoint();
    let mut cols: Vec<(f64, usize)> =
        (0..n).map(|c| (adj.row(c).map(|(_, v)| v.norm().powf(p)).sum::<f64>(), c)).collect();
    cols.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, c) in cols.iter().take(3) {
        let mut e = vec![ZERO; n];
        e[c] = Complex64::new(1.0, 0.0);
        starts.push(e);
    }
    starts.push(vec![Complex64::new(1.0, 0.0); n]);
    for t in 0..trials {
        starts.push(random_unit(n, seed.wrapping_add(t as u64)));
    }
    let ratio = |x: &[Complex64]| {
        let nx = norm_p(x, p);
        if nx == 0.0 {
            0.0
        } else {
            norm_p(&m.matvec(x), p) / nx
        }
    };
    let mut best: f64 = 0.0;
    for mut x in starts {
        best = best.max(ratio(&x));
        for _ in 0..iters {
            let y = m.matvec(&x);
            if norm_p(&y, p) == 0.0 {
                break;
            }
            let z = m.matvec_adj(&duality_map(&y, p));
            let next = duality_map(&z, q);
            let nn = norm_p(&next, p);
            if nn == 0.0 {
                break;
            }
            x = next.iter().map(|v| v / nn).collect();
            let r = ratio(&x);
            let gain = r - best;
            best = best.max(r);
            if gain.abs() <= 1e-14 * best {
                break;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn csr_sums_duplicates_and_adjoint() {
        let m = CsrMatrix::from_triplets(
            2,
            3,
            vec![(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 2, Complex64::new(0.0, 1.0))],
        );
        assert_eq!(m.get(0, 1), c(3.0));
        assert_eq!(m.adjoint().get(2, 1), Complex64::new(0.0, -1.0));
        assert_eq!(m.max_row_sum(), 3.0);
        assert_eq!(m.matvec(&[c(1.0), c(1.0), c(1.0)]), vec![c(3.0), Complex64::new(0.0, 1.0)]);
    }

    #[test]
    fn p_norm_of_diagonal() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, c(3.0)), (1, 1, c(1.0))]);
        assert_eq!(p_norm_lower(&m, 1.5, 4, 20, 1), 3.0);
        assert_eq!(p_norm_lower(&CsrMatrix::identity(5), 4.0 / 3.0, 4, 20, 1), 1.0);
    }

    #[test]
    fn lanczos_matches_dense_on_a_path() {
        // adjacency of a path on 600 vertices: top singular value 2cos(π/601)
        let n = 600u32;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.push((i, i + 1, c(1.0)));
            t.push((i + 1, i, c(1.0)));
        }
        let m = CsrMatrix::from_triplets(n as usize, n as usize, t);
        let est = top_singular_value(&m).unwrap();
        let exact = 2.0 * (std::f64::consts::PI / 601.0).cos();
        assert!(matches!(est.method, SvdMethod::Lanczos { .. }));
        assert!(est.value <= exact + 1e-12);
        assert!(exact - est.value < 1e-4, "{} vs {exact}", est.value);
    }

    #[test]
    fn permutation_spectra() {
        let mut m = Mat::<Complex64>::zeros(6, 6);
        for i in 0..6 {
            m[((i + 1) % 6, i)] = c(1.0);
        }
        let ev = eigenvalues(&m).unwrap();
        let roots: Vec<Complex64> =
            (0..6).map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 6.0)).collect();
        assert!(multiset_distance(&ev, &roots) < 1e-10);
    }
}
