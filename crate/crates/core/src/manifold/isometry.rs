use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::ManifoldKind;
use crate::error::{Error, Result};
use crate::linalg::{self, from_row_major, matvec, to_row_major};

/// An isometry `Φ` of one of the supported manifolds, with its differential.
#[derive(Clone, Debug, PartialEq)]
pub enum Isometry {
    /// `p ↦ Qp + b`
    Euclidean { q: DMatrix<f64>, shift: Vec<f64> },
    /// `p ↦ Qp`, `Q` orthogonal
    Sphere { q: DMatrix<f64> },
    /// `p ↦ Λp`, `Λ` an orthochronous Lorentz transformation
    Lorentz { lambda: DMatrix<f64> },
    /// `p ↦ g p gᵀ`, `g` invertible
    Spd { g: DMatrix<f64> },
}

impl Isometry {
    pub fn identity(kind: ManifoldKind) -> Self {
        match kind {
            ManifoldKind::Euclidean(d) => Isometry::Euclidean {
                q: DMatrix::identity(d, d),
                shift: alloc::vec![0.0; d],
            },
            ManifoldKind::Sphere(d) => Isometry::Sphere {
                q: DMatrix::identity(d + 1, d + 1),
            },
            ManifoldKind::Lorentz(d) => Isometry::Lorentz {
                lambda: DMatrix::identity(d + 1, d + 1),
            },
            ManifoldKind::Spd(n) => Isometry::Spd {
                g: DMatrix::identity(n, n),
            },
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        match self {
            Isometry::Euclidean { q, .. } => ManifoldKind::Euclidean(q.nrows()),
            Isometry::Sphere { q } => ManifoldKind::Sphere(q.nrows() - 1),
            Isometry::Lorentz { lambda } => ManifoldKind::Lorentz(lambda.nrows() - 1),
            Isometry::Spd { g } => ManifoldKind::Spd(g.nrows()),
        }
    }

    fn check(&self, kind: ManifoldKind) -> Result<()> {
        if self.kind() != kind {
            return Err(Error::KindMismatch {
                expected: self.kind(),
                found: kind,
            });
        }
        Ok(())
    }

    /// `Φ(p)`
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Isometry::Euclidean { q, shift } => {
                let mut out = matvec(q, p);
                linalg::axpy(1.0, shift, &mut out);
                out
            }
            Isometry::Sphere { q } => matvec(q, p),
            Isometry::Lorentz { lambda } => matvec(lambda, p),
            Isometry::Spd { g } => {
                let n = g.nrows();
                to_row_major(&linalg::symmetrize(
                    &(g * from_row_major(n, p) * g.transpose()),
                ))
            }
        }
    }

    /// `d_pΦ(x)`. All four representations act linearly on ambient tangent
    /// coordinates, so the base point is not needed.
    pub fn push(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Isometry::Euclidean { q, .. } => matvec(q, x),
            Isometry::Sphere { q } => matvec(q, x),
            Isometry::Lorentz { lambda } => matvec(lambda, x),
            Isometry::Spd { g } => {
                let n = g.nrows();
                to_row_major(&linalg::symmetrize(
                    &(g * from_row_major(n, x) * g.transpose()),
                ))
            }
        }
    }

    pub fn apply_point(&self, p: &super::ManifoldPoint) -> Result<super::ManifoldPoint> {
        self.check(p.kind())?;
        Ok(super::ManifoldPoint::new_unchecked(
            p.kind(),
            self.apply(p.coords()),
        ))
    }

    pub fn push_tangent(&self, x: &super::TangentVector) -> Result<super::TangentVector> {
        let base = self.apply_point(x.base())?;
        Ok(super::TangentVector::new_unchecked(
            base,
            self.push(x.coords()),
        ))
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        other.check(self.kind())?;
        Ok(match (self, other) {
            (
                Isometry::Euclidean { q: q1, shift: b1 },
                Isometry::Euclidean { q: q2, shift: b2 },
            ) => {
                let mut shift = matvec(q1, b2);
                linalg::axpy(1.0, b1, &mut shift);
                Isometry::Euclidean { q: q1 * q2, shift }
            }
            (Isometry::Sphere { q: a }, Isometry::Sphere { q: b }) => Isometry::Sphere { q: a * b },
            (Isometry::Lorentz { lambda: a }, Isometry::Lorentz { lambda: b }) => {
                Isometry::Lorentz { lambda: a * b }
            }
            (Isometry::Spd { g: a }, Isometry::Spd { g: b }) => Isometry::Spd { g: a * b },
            _ => unreachable!("kinds checked above"),
        })
    }

    pub fn inverse(&self) -> Isometry {
        match self {
            Isometry::Euclidean { q, shift } => {
                let qt = q.transpose();
                let shift = matvec(&qt, shift).into_iter().map(|v| -v).collect();
                Isometry::Euclidean { q: qt, shift }
            }
            Isometry::Sphere { q } => Isometry::Sphere { q: q.transpose() },
            Isometry::Lorentz { lambda } => {
                // Λ⁻¹ = J Λᵀ J with J = diag(1, …, 1, -1)
                let n = lambda.nrows();
                let mut inv = lambda.transpose();
                for i in 0..n {
                    inv[(i, n - 1)] = -inv[(i, n - 1)];
                    inv[(n - 1, i)] = -inv[(n - 1, i)];
                }
                Isometry::Lorentz { lambda: inv }
            }
            Isometry::Spd { g } => Isometry::Spd {
                g: g.clone()
                    .try_inverse()
                    .expect("isometry matrix is invertible"),
            },
        }
    }

    /// A permutation of the spatial / ambient coordinate axes, which is an
    /// isometry for every model except SPD where it acts by congruence.
    pub fn coordinate_permutation(kind: ManifoldKind, perm: &[usize]) -> Result<Isometry> {
        let n = match kind {
            ManifoldKind::Euclidean(d) => d,
            ManifoldKind::Sphere(d) => d + 1,
            ManifoldKind::Lorentz(d) => d,
            ManifoldKind::Spd(n) => n,
        };
        if perm.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: perm.len(),
            });
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m[(j, i)] = 1.0;
        }
        Ok(match kind {
            ManifoldKind::Euclidean(d) => Isometry::Euclidean {
                q: m,
                shift: alloc::vec![0.0; d],
            },
            ManifoldKind::Sphere(_) => Isometry::Sphere { q: m },
            ManifoldKind::Lorentz(d) => {
                let mut lambda = DMatrix::identity(d + 1, d + 1);
                lambda.view_mut((0, 0), (d, d)).copy_from(&m);
                Isometry::Lorentz { lambda }
            }
            ManifoldKind::Spd(_) => Isometry::Spd { g: m },
        })
    }
}
