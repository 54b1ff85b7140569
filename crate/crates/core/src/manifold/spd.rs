//! Affine-invariant geometry on symmetric positive definite matrices.
//!
//! With `S = p^{1/2}` and `W = p^{-1/2}`:
//! `exp_p(X) = S·expm(W X W)·S`, `log_p(q) = S·logm(W q W)·S`,
//! `<X,Y>_p = tr(p^{-1} X p^{-1} Y)`, `dist(p,q) = |logm(W q W)|_F`.

use crate::linalg::{self, from_row_major, EIGEN_FLOOR};
#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;

fn write(out: &mut [f64], m: &nalgebra::DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = m[(i, j)];
        }
    }
}

pub(super) fn inner(n: usize, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let (_, w) = linalg::spd_sqrt_pair(&from_row_major(n, p));
    let a = &w * from_row_major(n, x) * &w;
    let b = &w * from_row_major(n, y) * &w;
    linalg::frobenius_inner(&a, &b)
}

pub(super) fn exp(n: usize, p: &[f64], x: &[f64], out: &mut [f64]) {
    let (s, w) = linalg::spd_sqrt_pair(&from_row_major(n, p));
    let inner = &w * linalg::symmetrize(&from_row_major(n, x)) * &w;
    let e = linalg::sym_fn(&inner, |l| l.exp());
    write(out, &linalg::symmetrize(&(&s * e * &s)));
}

pub(super) fn log(n: usize, p: &[f64], q: &[f64], out: &mut [f64]) {
    let (s, w) = linalg::spd_sqrt_pair(&from_row_major(n, p));
    let inner = &w * from_row_major(n, q) * &w;
    let l = linalg::sym_fn(&inner, |v| v.max(EIGEN_FLOOR).ln());
    write(out, &linalg::symmetrize(&(&s * l * &s)));
}

pub(super) fn dist(n: usize, p: &[f64], q: &[f64]) -> f64 {
    let (_, w) = linalg::spd_sqrt_pair(&from_row_major(n, p));
    let inner = &w * from_row_major(n, q) * &w;
    let (values, _) = linalg::sym_eigen(&inner);
    values
        .iter()
        .map(|v| v.max(EIGEN_FLOOR).ln().powi(2))
        .sum::<f64>()
        .sqrt()
}
