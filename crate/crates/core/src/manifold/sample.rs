use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{Isometry, ManifoldKind, ManifoldPoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{self, from_row_major, to_row_major};

fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Direction drawn uniformly, length uniform in `(0, scale]`.
fn random_tangent_raw<R: Rng + ?Sized>(
    kind: ManifoldKind,
    p: &[f64],
    scale: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut x = match kind {
        ManifoldKind::Spd(n) => {
            // symmetric direction at the identity, transported by p^{1/2}
            let g = linalg::gaussian_matrix(n, n, rng);
            let s = linalg::symmetrize(&g);
            let (root, _) = linalg::spd_sqrt_pair(&from_row_major(n, p));
            to_row_major(&linalg::symmetrize(&(&root * s * &root)))
        }
        _ => gaussian(kind.ambient_dim(), rng),
    };
    kind.project_tangent(p, &mut x);
    let norm = kind.norm(p, &x);
    let length = scale * (1.0 - rng.random::<f64>());
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v *= length / norm);
    }
    x
}

pub fn random_point<R: Rng + ?Sized>(kind: ManifoldKind, rng: &mut R) -> ManifoldPoint {
    let coords = match kind {
        ManifoldKind::Euclidean(d) => gaussian(d, rng),
        ManifoldKind::Sphere(d) => {
            let mut g = gaussian(d + 1, rng);
            super::sphere::normalize(&mut g);
            g
        }
        ManifoldKind::Lorentz(_) | ManifoldKind::Spd(_) => {
            let o = kind.origin();
            let x = random_tangent_raw(kind, &o, 1.5, rng);
            kind.exp(&o, &x)
        }
    };
    ManifoldPoint::new_unchecked(kind, coords)
}

/// Tangent vector at `p` with uniformly random direction and norm in `(0, scale]`.
pub fn random_tangent<R: Rng + ?Sized>(
    p: &ManifoldPoint,
    scale: f64,
    rng: &mut R,
) -> Result<TangentVector> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParams(alloc::format!(
            "tangent scale must be positive, got {scale}"
        )));
    }
    let x = random_tangent_raw(p.kind(), p.coords(), scale, rng);
    Ok(TangentVector::new_unchecked(p.clone(), x))
}

/// Random isometry; the orthogonal parts are Haar distributed, so reflections
/// occur with probability 1/2.
pub fn random_isometry<R: Rng + ?Sized>(kind: ManifoldKind, rng: &mut R) -> Isometry {
    match kind {
        ManifoldKind::Euclidean(d) => Isometry::Euclidean {
            q: linalg::haar_orthogonal(d, rng),
            shift: gaussian(d, rng),
        },
        ManifoldKind::Sphere(d) => Isometry::Sphere {
            q: linalg::haar_orthogonal(d + 1, rng),
        },
        ManifoldKind::Lorentz(d) => {
            let rotation = linalg::haar_orthogonal(d, rng);
            let mut dir = gaussian(d, rng);
            let n = linalg::norm2(&dir);
            dir.iter_mut().for_each(|v| *v /= n);
            let rapidity: f64 = Normal::new(0.0, 0.7).unwrap().sample(rng);
            let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
            let mut boost = DMatrix::identity(d + 1, d + 1);
            for i in 0..d {
                for j in 0..d {
                    boost[(i, j)] += (ch - 1.0) * dir[i] * dir[j];
                }
                boost[(i, d)] = sh * dir[i];
                boost[(d, i)] = sh * dir[i];
            }
            boost[(d, d)] = ch;
            let mut spin = DMatrix::identity(d + 1, d + 1);
            spin.view_mut((0, 0), (d, d)).copy_from(&rotation);
            Isometry::Lorentz {
                lambda: spin * boost,
            }
        }
        ManifoldKind::Spd(n) => {
            let q1 = linalg::haar_orthogonal(n, rng);
            let q2 = linalg::haar_orthogonal(n, rng);
            let scales = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
                let z: f64 = StandardNormal.sample(rng);
                (0.4 * z).exp()
            }));
            Isometry::Spd {
                g: q1 * scales * q2,
            }
        }
    }
}
