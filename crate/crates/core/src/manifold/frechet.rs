use alloc::vec;
use alloc::vec::Vec;

use super::ManifoldKind;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrechetOptions {
    /// Stop once `|Σ w_i log_p(p_i)|_p` falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Weighted Fréchet mean by the fixed-point iteration
/// `p ← exp_p(Σ w_i log_p p_i)`, started at the point with the largest weight.
///
/// Weights must be positive; they are renormalized to sum to one.
pub fn frechet_mean(kind: ManifoldKind, points: &[&[f64]], weights: &[f64]) -> Result<Vec<f64>> {
    frechet_mean_with(kind, points, weights, None, FrechetOptions::default())
}

pub fn frechet_mean_with(
    kind: ManifoldKind,
    points: &[&[f64]],
    weights: &[f64],
    start: Option<&[f64]>,
    opts: FrechetOptions,
) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Empty("Fréchet mean of zero points"));
    }
    if points.len() != weights.len() {
        return Err(Error::ShapeMismatch {
            expected: points.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidParams(
            "Fréchet weights must be positive and finite".into(),
        ));
    }
    let total: f64 = weights.iter().sum();

    let mut p = match start {
        Some(s) => s.to_vec(),
        None => {
            let best = weights
                .iter()
                .enumerate()
                .fold(0, |b, (i, w)| if *w > weights[b] { i } else { b });
            points[best].to_vec()
        }
    };
    let n = kind.ambient_dim();
    let mut grad = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..=opts.max_iter {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (q, w) in points.iter().zip(weights) {
            kind.log_into(&p, q, &mut scratch)?;
            crate::linalg::axpy(w / total, &scratch, &mut grad);
        }
        residual = kind.norm(&p, &grad);
        if residual < opts.tol {
            return Ok(p);
        }
        kind.exp_into(&p, &grad, &mut next);
        core::mem::swap(&mut p, &mut next);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// `|Σ w_i log_p(p_i)|_p` with normalized weights.
pub fn optimality_residual(
    kind: ManifoldKind,
    p: &[f64],
    points: &[&[f64]],
    weights: &[f64],
) -> Result<f64> {
    let total: f64 = weights.iter().sum();
    let mut grad = vec![0.0; kind.ambient_dim()];
    for (q, w) in points.iter().zip(weights) {
        let l = kind.log(p, q)?;
        crate::linalg::axpy(w / total, &l, &mut grad);
    }
    Ok(kind.norm(p, &grad))
}
