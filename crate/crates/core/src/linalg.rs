//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Matrices cross module boundaries as row-major `&[f64]` slices; these
//! helpers convert to `DMatrix` only where a factorization is needed.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Eigenvalue floor used whenever an SPD matrix is factorized.
pub const EIGEN_FLOOR: f64 = 1e-12;

pub fn from_row_major(n: usize, data: &[f64]) -> DMatrix<f64> {
    debug_assert_eq!(data.len(), n * n);
    DMatrix::from_row_slice(n, n, data)
}

pub fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest absolute asymmetry `max |m_ij - m_ji|`.
pub fn asymmetry(n: usize, data: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((data[i * n + j] - data[j * n + i]).abs());
        }
    }
    worst
}

/// Symmetric eigendecomposition `m = V diag(λ) Vᵀ`.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = symmetrize(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Applies a scalar function spectrally: `V diag(f(λ)) Vᵀ`.
pub fn sym_apply(
    values: &DVector<f64>,
    vectors: &DMatrix<f64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<f64> {
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let s = f(lambda);
        scaled.column_mut(j).scale_mut(s);
    }
    symmetrize(&(scaled * vectors.transpose()))
}

pub fn sym_fn(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen(m);
    sym_apply(&values, &vectors, f)
}

/// `(p^{1/2}, p^{-1/2})` for a symmetric positive definite `p`, eigenvalues
/// clamped to [`EIGEN_FLOOR`].
pub fn spd_sqrt_pair(p: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (values, vectors) = sym_eigen(p);
    let sqrt = sym_apply(&values, &vectors, |l| l.max(EIGEN_FLOOR).sqrt());
    let inv_sqrt = sym_apply(&values, &vectors, |l| 1.0 / l.max(EIGEN_FLOOR).sqrt());
    (sqrt, inv_sqrt)
}

pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of `R`'s diagonal folded into `Q`). Both determinant signs occur with
/// probability 1/2.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `max_i |a_i - b_i|`
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `out += s * x`
pub fn axpy(s: f64, x: &[f64], out: &mut [f64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += s * v;
    }
}

pub fn matvec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v))
        .iter()
        .copied()
        .collect()
}
