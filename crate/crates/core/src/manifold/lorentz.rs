#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
/// Minkowski bilinear form with signature `(+,…,+,-)`; the last coordinate is time.
pub fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let spatial: f64 = x[..n - 1].iter().zip(&y[..n - 1]).map(|(a, b)| a * b).sum();
    spatial - x[n - 1] * y[n - 1]
}

/// Recomputes the time coordinate from the spatial ones.
pub(super) fn lift(p: &mut [f64]) {
    let n = p.len();
    let s: f64 = p[..n - 1].iter().map(|a| a * a).sum();
    p[n - 1] = (1.0 + s).sqrt();
}

/// `d = 2·asinh(|q-p|_L / 2)`; the chord form avoids the cancellation of
/// `acosh(-<p,q>_L)` near the diagonal.
pub(super) fn dist(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len();
    let mut chord = 0.0;
    for i in 0..n - 1 {
        let d = q[i] - p[i];
        chord += d * d;
    }
    let dt = q[n - 1] - p[n - 1];
    chord -= dt * dt;
    2.0 * (chord.max(0.0).sqrt() * 0.5).asinh()
}

pub(super) fn exp(p: &[f64], x: &[f64], out: &mut [f64]) {
    let n = minkowski(x, x).max(0.0).sqrt();
    if n == 0.0 {
        out.copy_from_slice(p);
        return;
    }
    let c = n.cosh();
    let k = n.sinh() / n;
    for ((o, a), v) in out.iter_mut().zip(p).zip(x) {
        *o = c * a + k * v;
    }
    lift(out);
}

pub(super) fn log(p: &[f64], q: &[f64], out: &mut [f64]) {
    let d = dist(p, q);
    if d == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    let alpha = (-minkowski(p, q)).max(1.0);
    let k = d / d.sinh();
    for ((o, a), b) in out.iter_mut().zip(p).zip(q) {
        *o = k * (b - alpha * a);
    }
}
