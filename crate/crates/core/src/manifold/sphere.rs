use core::f64::consts::PI;

use super::SPHERE_CUT_TOL;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;

pub(super) fn normalize(p: &mut [f64]) {
    let n = norm2(p);
    if n > 0.0 {
        p.iter_mut().for_each(|c| *c /= n);
    }
}

/// Great-circle distance, `2·atan2(|q-p|, |q+p|)`; accurate for both nearby
/// and nearly antipodal points.
pub(super) fn dist(p: &[f64], q: &[f64]) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (a, b) in p.iter().zip(q) {
        diff += (b - a) * (b - a);
        sum += (b + a) * (b + a);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

pub(super) fn exp(p: &[f64], x: &[f64], out: &mut [f64]) {
    let n = norm2(x);
    if n == 0.0 {
        out.copy_from_slice(p);
        return;
    }
    let (s, c) = n.sin_cos();
    let k = s / n;
    for ((o, a), v) in out.iter_mut().zip(p).zip(x) {
        *o = c * a + k * v;
    }
    normalize(out);
}

pub(super) fn log(p: &[f64], q: &[f64], out: &mut [f64]) -> Result<()> {
    let d = dist(p, q);
    if d > PI - SPHERE_CUT_TOL {
        return Err(Error::CutLocus { distance: d });
    }
    let c = dot(p, q);
    for ((o, a), b) in out.iter_mut().zip(p).zip(q) {
        *o = b - c * a;
    }
    let u = norm2(out);
    if u == 0.0 || d == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return Ok(());
    }
    let k = d / u;
    out.iter_mut().for_each(|o| *o *= k);
    Ok(())
}
