//! Riemannian primitives for the four supported feature manifolds.
//!
//! Points and tangent vectors are stored in ambient coordinates: a `d`-vector
//! for `Euclidean(d)`, a unit vector in `R^{d+1}` for `Sphere(d)`, a
//! future-pointing vector on the hyperboloid `<x,x>_L = -1` in `R^{d+1}` for
//! `Lorentz(d)` (signature `(+,…,+,-)`, origin `[0 … 0 1]`), and a row-major
//! `n×n` symmetric positive definite matrix for `Spd(n)` with the
//! affine-invariant metric.
//!
//! The slice-level methods on [`ManifoldKind`] are the hot path used by the
//! layers. [`ManifoldPoint`] and [`TangentVector`] wrap them with invariant
//! checks for API users.

mod frechet;
mod isometry;
mod lorentz;
mod sample;
mod spd;
mod sphere;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub use frechet::{frechet_mean, frechet_mean_with, optimality_residual, FrechetOptions};
pub use isometry::Isometry;
pub use lorentz::minkowski;
pub use sample::{random_isometry, random_point, random_tangent};

/// Tolerance for the point/tangent invariants.
pub const INVARIANT_TOL: f64 = 1e-10;

/// Two sphere points closer than this to antipodal have no logarithm.
pub const SPHERE_CUT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dim", rename_all = "lowercase")]
pub enum ManifoldKind {
    Euclidean(usize),
    Sphere(usize),
    Lorentz(usize),
    Spd(usize),
}

impl ManifoldKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ManifoldKind::Euclidean(d) | ManifoldKind::Sphere(d) | ManifoldKind::Lorentz(d)
                if d < 1 =>
            {
                Err(Error::InvalidManifold(format!(
                    "{self:?}: dimension must be >= 1"
                )))
            }
            ManifoldKind::Spd(n) if n < 2 => Err(Error::InvalidManifold(format!(
                "{self:?}: matrix size must be >= 2"
            ))),
            _ => Ok(()),
        }
    }

    /// Intrinsic dimension of the manifold.
    pub fn dim(&self) -> usize {
        match *self {
            ManifoldKind::Euclidean(d) | ManifoldKind::Sphere(d) | ManifoldKind::Lorentz(d) => d,
            ManifoldKind::Spd(n) => n * (n + 1) / 2,
        }
    }

    /// Number of stored coordinates per point or tangent vector.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            ManifoldKind::Euclidean(d) => d,
            ManifoldKind::Sphere(d) | ManifoldKind::Lorentz(d) => d + 1,
            ManifoldKind::Spd(n) => n * n,
        }
    }

    /// Hadamard manifolds have a globally defined logarithm.
    pub fn is_hadamard(&self) -> bool {
        !matches!(self, ManifoldKind::Sphere(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldKind::Euclidean(_) => "euclidean",
            ManifoldKind::Sphere(_) => "sphere",
            ManifoldKind::Lorentz(_) => "lorentz",
            ManifoldKind::Spd(_) => "spd",
        }
    }

    /// Canonical base point: zero, the north pole `e_{d+1}`, the hyperboloid
    /// origin `[0 … 0 1]`, or the identity matrix.
    pub fn origin(&self) -> Vec<f64> {
        let n = self.ambient_dim();
        let mut o = vec![0.0; n];
        match *self {
            ManifoldKind::Euclidean(_) => {}
            ManifoldKind::Sphere(_) | ManifoldKind::Lorentz(_) => o[n - 1] = 1.0,
            ManifoldKind::Spd(m) => {
                for i in 0..m {
                    o[i * m + i] = 1.0;
                }
            }
        }
        o
    }

    pub fn zero_tangent(&self) -> Vec<f64> {
        vec![0.0; self.ambient_dim()]
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::ShapeMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "{}: non-finite coordinate",
                self.name()
            )));
        }
        Ok(())
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        self.check_len(p)?;
        match *self {
            ManifoldKind::Euclidean(_) => Ok(()),
            ManifoldKind::Sphere(_) => {
                let err = (linalg::norm2(p) - 1.0).abs();
                if err > INVARIANT_TOL {
                    return Err(Error::InvalidPoint(format!(
                        "sphere point norm deviates from 1 by {err:e}"
                    )));
                }
                Ok(())
            }
            ManifoldKind::Lorentz(_) => {
                let err = (minkowski(p, p) + 1.0).abs();
                // relative to the coordinate scale: far points carry cosh-sized entries
                let scale = p[p.len() - 1].abs().max(1.0);
                if err > INVARIANT_TOL * scale * scale {
                    return Err(Error::InvalidPoint(format!(
                        "<x,x>_L deviates from -1 by {err:e}"
                    )));
                }
                if p[p.len() - 1] <= 0.0 {
                    return Err(Error::InvalidPoint(
                        "hyperboloid point is not future-pointing".into(),
                    ));
                }
                Ok(())
            }
            ManifoldKind::Spd(n) => {
                let asym = linalg::asymmetry(n, p);
                if asym > INVARIANT_TOL {
                    return Err(Error::InvalidPoint(format!("matrix asymmetry {asym:e}")));
                }
                let (values, _) = linalg::sym_eigen(&linalg::from_row_major(n, p));
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                if min <= 1e-12 {
                    return Err(Error::InvalidPoint(format!(
                        "smallest eigenvalue {min:e} is not positive"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn check_tangent(&self, p: &[f64], x: &[f64]) -> Result<()> {
        self.check_len(x)?;
        let residual = match *self {
            ManifoldKind::Euclidean(_) => 0.0,
            ManifoldKind::Sphere(_) => linalg::dot(p, x).abs(),
            ManifoldKind::Lorentz(_) => {
                let scale = p[p.len() - 1].abs().max(1.0);
                minkowski(p, x).abs() / scale
            }
            ManifoldKind::Spd(n) => linalg::asymmetry(n, x),
        };
        if residual > INVARIANT_TOL * (1.0 + linalg::norm2(x)) {
            return Err(Error::InvalidTangent(format!(
                "{}: tangency residual {residual:e}",
                self.name()
            )));
        }
        Ok(())
    }

    /// Riemannian inner product `<x, y>_p`.
    pub fn inner(&self, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
        match *self {
            ManifoldKind::Euclidean(_) | ManifoldKind::Sphere(_) => linalg::dot(x, y),
            ManifoldKind::Lorentz(_) => minkowski(x, y),
            ManifoldKind::Spd(n) => spd::inner(n, p, x, y),
        }
    }

    pub fn norm(&self, p: &[f64], x: &[f64]) -> f64 {
        self.inner(p, x, x).max(0.0).sqrt()
    }

    /// Riemannian exponential `exp_p(x)`, written to `out`.
    pub fn exp_into(&self, p: &[f64], x: &[f64], out: &mut [f64]) {
        match *self {
            ManifoldKind::Euclidean(_) => {
                for ((o, a), b) in out.iter_mut().zip(p).zip(x) {
                    *o = a + b;
                }
            }
            ManifoldKind::Sphere(_) => sphere::exp(p, x, out),
            ManifoldKind::Lorentz(_) => lorentz::exp(p, x, out),
            ManifoldKind::Spd(n) => spd::exp(n, p, x, out),
        }
    }

    pub fn exp(&self, p: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.exp_into(p, x, &mut out);
        out
    }

    /// Riemannian logarithm `log_p(q)`, written to `out`.
    pub fn log_into(&self, p: &[f64], q: &[f64], out: &mut [f64]) -> Result<()> {
        match *self {
            ManifoldKind::Euclidean(_) => {
                for ((o, a), b) in out.iter_mut().zip(p).zip(q) {
                    *o = b - a;
                }
                Ok(())
            }
            ManifoldKind::Sphere(_) => sphere::log(p, q, out),
            ManifoldKind::Lorentz(_) => {
                lorentz::log(p, q, out);
                Ok(())
            }
            ManifoldKind::Spd(n) => {
                spd::log(n, p, q, out);
                Ok(())
            }
        }
    }

    pub fn log(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; p.len()];
        self.log_into(p, q, &mut out)?;
        Ok(out)
    }

    /// Geodesic distance. Defined everywhere (antipodal sphere points give π).
    pub fn dist(&self, p: &[f64], q: &[f64]) -> f64 {
        match *self {
            ManifoldKind::Euclidean(_) => p
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            ManifoldKind::Sphere(_) => sphere::dist(p, q),
            ManifoldKind::Lorentz(_) => lorentz::dist(p, q),
            ManifoldKind::Spd(n) => spd::dist(n, p, q),
        }
    }

    /// Whether `log_p(q)` exists.
    pub fn log_defined(&self, p: &[f64], q: &[f64]) -> bool {
        match self {
            ManifoldKind::Sphere(_) => sphere::dist(p, q) <= core::f64::consts::PI - SPHERE_CUT_TOL,
            _ => true,
        }
    }

    /// Pulls a nearly-valid point back onto the manifold.
    pub fn project_point(&self, p: &mut [f64]) {
        match *self {
            ManifoldKind::Euclidean(_) => {}
            ManifoldKind::Sphere(_) => sphere::normalize(p),
            ManifoldKind::Lorentz(_) => lorentz::lift(p),
            ManifoldKind::Spd(n) => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let m = 0.5 * (p[i * n + j] + p[j * n + i]);
                        p[i * n + j] = m;
                        p[j * n + i] = m;
                    }
                }
            }
        }
    }

    /// Projects an ambient vector onto `T_pM`.
    pub fn project_tangent(&self, p: &[f64], x: &mut [f64]) {
        match *self {
            ManifoldKind::Euclidean(_) => {}
            ManifoldKind::Sphere(_) => {
                let c = linalg::dot(p, x);
                linalg::axpy(-c, p, x);
            }
            ManifoldKind::Lorentz(_) => {
                let c = minkowski(p, x);
                linalg::axpy(c, p, x);
            }
            ManifoldKind::Spd(n) => self_symmetrize(n, x),
        }
    }
}

fn self_symmetrize(n: usize, x: &mut [f64]) {
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (x[i * n + j] + x[j * n + i]);
            x[i * n + j] = m;
            x[j * n + i] = m;
        }
    }
}

/// A validated point on a manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    kind: ManifoldKind,
    coords: Vec<f64>,
}

impl ManifoldPoint {
    pub fn new(kind: ManifoldKind, coords: Vec<f64>) -> Result<Self> {
        kind.validate()?;
        kind.check_point(&coords)?;
        Ok(Self { kind, coords })
    }

    pub(crate) fn new_unchecked(kind: ManifoldKind, coords: Vec<f64>) -> Self {
        Self { kind, coords }
    }

    pub fn origin(kind: ManifoldKind) -> Self {
        Self::new_unchecked(kind, kind.origin())
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: ManifoldPoint,
    coords: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: ManifoldPoint, coords: Vec<f64>) -> Result<Self> {
        base.kind.check_tangent(&base.coords, &coords)?;
        Ok(Self { base, coords })
    }

    pub(crate) fn new_unchecked(base: ManifoldPoint, coords: Vec<f64>) -> Self {
        Self { base, coords }
    }

    pub fn zero(base: ManifoldPoint) -> Self {
        let coords = base.kind.zero_tangent();
        Self { base, coords }
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.base.kind.norm(&self.base.coords, &self.coords)
    }
}

fn same_base(p: &ManifoldPoint, x: &TangentVector) -> Result<()> {
    if p.kind != x.base.kind {
        return Err(Error::KindMismatch {
            expected: p.kind,
            found: x.base.kind,
        });
    }
    if linalg::max_abs_diff(&p.coords, &x.base.coords) > INVARIANT_TOL {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

fn same_kind(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<()> {
    if p.kind != q.kind {
        return Err(Error::KindMismatch {
            expected: p.kind,
            found: q.kind,
        });
    }
    Ok(())
}

pub fn inner(p: &ManifoldPoint, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    same_base(p, x)?;
    same_base(p, y)?;
    Ok(p.kind.inner(&p.coords, &x.coords, &y.coords))
}

pub fn exp(p: &ManifoldPoint, x: &TangentVector) -> Result<ManifoldPoint> {
    same_base(p, x)?;
    Ok(ManifoldPoint::new_unchecked(
        p.kind,
        p.kind.exp(&p.coords, &x.coords),
    ))
}

pub fn log(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<TangentVector> {
    same_kind(p, q)?;
    let coords = p.kind.log(&p.coords, &q.coords)?;
    Ok(TangentVector::new_unchecked(p.clone(), coords))
}

pub fn dist(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
    same_kind(p, q)?;
    Ok(p.kind.dist(&p.coords, &q.coords))
}
