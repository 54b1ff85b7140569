use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SyntheticGraph;
use crate::error::{Error, Result};
use crate::graph::{FeatureGraph, FeatureMap};
use crate::ManifoldKind;

fn feature_graph(g: &SyntheticGraph, map: FeatureMap) -> Result<FeatureGraph> {
    FeatureGraph::from_undirected(g.nodes, &g.edges, g.weight(), vec![map])
}

/// Node `k` ↦ `exp_o(e_k)` in `Lorentz(n)`: every feature sits at distance one
/// from the origin and all pairs of features are equidistant.
pub fn embed_onehot_hyperbolic(g: &SyntheticGraph) -> Result<FeatureGraph> {
    let n = g.nodes;
    let kind = ManifoldKind::Lorentz(n);
    let (s, c) = (1.0f64.sinh(), 1.0f64.cosh());
    let mut data = vec![0.0; n * (n + 1)];
    for k in 0..n {
        let p = &mut data[k * (n + 1)..(k + 1) * (n + 1)];
        p[k] = s;
        p[n] = c;
    }
    feature_graph(g, FeatureMap::new(kind, data)?)
}

/// Linear map from degree one-hot vectors (length `n`, spatial part of
/// `T_o H^n`) to the spatial part of `T_o H^dim`; `dim × n` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeEmbedding {
    pub nodes: usize,
    pub dim: usize,
    pub matrix: Vec<f64>,
}

impl DegreeEmbedding {
    pub fn new(nodes: usize, dim: usize, matrix: Vec<f64>) -> Result<Self> {
        if nodes == 0 || dim == 0 {
            return Err(Error::InvalidParams(
                "degree embedding needs positive sizes".into(),
            ));
        }
        if matrix.len() != nodes * dim {
            return Err(Error::ShapeMismatch {
                expected: nodes * dim,
                found: matrix.len(),
            });
        }
        Ok(Self { nodes, dim, matrix })
    }

    pub fn identity(nodes: usize) -> Self {
        let mut matrix = vec![0.0; nodes * nodes];
        for i in 0..nodes {
            matrix[i * nodes + i] = 1.0;
        }
        Self {
            nodes,
            dim: nodes,
            matrix,
        }
    }

    /// Gaussian entries with variance `1/dim`, so columns have roughly unit length.
    pub fn random(nodes: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0 / (dim.max(1) as f64).sqrt()).expect("positive variance");
        let matrix = (0..nodes * dim).map(|_| normal.sample(&mut rng)).collect();
        Self::new(nodes, dim, matrix)
    }
}

/// One-hot degree vector mapped linearly into `T_o H^dim`, then `exp_o`.
pub fn embed_degree_hyperbolic(g: &SyntheticGraph, map: &DegreeEmbedding) -> Result<FeatureGraph> {
    if map.nodes != g.nodes {
        return Err(Error::ShapeMismatch {
            expected: g.nodes,
            found: map.nodes,
        });
    }
    let (n, d) = (g.nodes, map.dim);
    let kind = ManifoldKind::Lorentz(d);
    let origin = kind.origin();
    let mut data = Vec::with_capacity(n * (d + 1));
    for degree in g.degrees() {
        if degree >= n {
            return Err(Error::DegreeOverflow {
                degree,
                capacity: n,
            });
        }
        let mut x = vec![0.0; d + 1];
        for (i, xi) in x.iter_mut().take(d).enumerate() {
            *xi = map.matrix[i * n + degree];
        }
        data.extend(kind.exp(&origin, &x));
    }
    feature_graph(g, FeatureMap::new(kind, data)?)
}

/// Number of nodes that fit into `SPD(size)` with symmetric one-hot matrices.
pub fn spd_capacity(size: usize) -> usize {
    size * size.saturating_sub(1) / 2
}

/// Node `k` ↦ `exp_I(E_k)`, `E_k` the symmetric matrix with ones at the k-th
/// off-diagonal pair `(i, j)`, `i < j`, in row-major order.
pub fn embed_onehot_spd(g: &SyntheticGraph, size: usize) -> Result<FeatureGraph> {
    let available = spd_capacity(size);
    if g.nodes > available {
        return Err(Error::CapacityExceeded {
            needed: g.nodes,
            available,
        });
    }
    let kind = ManifoldKind::Spd(size);
    let identity = kind.origin();
    let pairs = (0..size).flat_map(|i| ((i + 1)..size).map(move |j| (i, j)));
    let mut data = Vec::with_capacity(g.nodes * size * size);
    for (i, j) in pairs.take(g.nodes) {
        let mut e = vec![0.0; size * size];
        e[i * size + j] = 1.0;
        e[j * size + i] = 1.0;
        data.extend(kind.exp(&identity, &e));
    }
    feature_graph(g, FeatureMap::new(kind, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_synthetic, Family, Hyper, SyntheticSpec};
    use crate::linalg::{from_row_major, sym_eigen};
    use crate::manifold::Isometry;

    fn graph(n: usize) -> SyntheticGraph {
        gen_synthetic(
            &SyntheticSpec::new(Family::ErdosRenyi, n, 4).with_hyper(Hyper::ErdosRenyi { p: 0.4 }),
        )
        .unwrap()
    }

    #[test]
    fn onehot_lorentz_geometry() {
        let g = SyntheticGraph {
            family: Family::ErdosRenyi,
            hyper: Hyper::ErdosRenyi { p: 1.0 },
            nodes: 3,
            edges: vec![(0, 1), (0, 2), (1, 2)],
        };
        let fg = embed_onehot_hyperbolic(&g).unwrap();
        let kind = ManifoldKind::Lorentz(3);
        let o = kind.origin();
        let f = fg.channel(0);
        for k in 0..3 {
            assert!((kind.dist(&o, f.point(k)) - 1.0).abs() < 1e-12);
            // arccosh(-<p, o>_L) = arccosh(p_time)
            assert!((f.point(k)[3].acosh() - 1.0).abs() < 1e-12);
        }
        let d01 = kind.dist(f.point(0), f.point(1));
        assert!((kind.dist(f.point(0), f.point(2)) - d01).abs() < 1e-12);
        assert!((kind.dist(f.point(1), f.point(2)) - d01).abs() < 1e-12);
        // cosh d = cosh²1 - 0 for orthogonal unit directions
        assert!((d01.cosh() - 1.0f64.cosh().powi(2)).abs() < 1e-12);

        let g = graph(7);
        let fg = embed_onehot_hyperbolic(&g).unwrap();
        assert_eq!(fg.edges().len(), 2 * g.edges.len());
        assert!(fg.edges().iter().all(|e| e.weight == 1.0 / 7.0));
    }

    #[test]
    fn onehot_permutation_is_isometry() {
        let g = graph(6);
        let perm = [3, 0, 5, 1, 4, 2];
        let mut relabelled = g.clone();
        relabelled.edges = g
            .edges
            .iter()
            .map(|(a, b)| (perm[*a].min(perm[*b]), perm[*a].max(perm[*b])))
            .collect();
        relabelled.edges.sort_unstable();

        // moving node v to perm[v] carries e_v along; re-embedding gives e_{perm[v]}
        let moved = embed_onehot_hyperbolic(&g).unwrap().permute(&perm).unwrap();
        let phi = Isometry::coordinate_permutation(ManifoldKind::Lorentz(6), &perm).unwrap();
        let fresh = embed_onehot_hyperbolic(&relabelled).unwrap();
        let mapped = moved.apply_isometry(&phi).unwrap();
        assert!(
            crate::linalg::max_abs_diff(fresh.channel(0).as_slice(), mapped.channel(0).as_slice())
                < 1e-15
        );
    }

    #[test]
    fn degree_embedding() {
        let g = graph(8);
        let id = DegreeEmbedding::identity(8);
        let fg = embed_degree_hyperbolic(&g, &id).unwrap();
        let kind = ManifoldKind::Lorentz(8);
        let degrees = g.degrees();
        for (v, deg) in degrees.iter().enumerate() {
            let mut x = vec![0.0; 9];
            x[*deg] = 1.0;
            assert!(
                crate::linalg::max_abs_diff(fg.channel(0).point(v), &kind.exp(&kind.origin(), &x))
                    < 1e-15
            );
        }
        let map = DegreeEmbedding::random(8, 3, 1).unwrap();
        let fg = embed_degree_hyperbolic(&g, &map).unwrap();
        assert_eq!(fg.kind(), Some(ManifoldKind::Lorentz(3)));
        for a in 0..8 {
            for b in 0..8 {
                if degrees[a] == degrees[b] {
                    assert_eq!(fg.channel(0).point(a), fg.channel(0).point(b));
                }
            }
        }
        assert!(embed_degree_hyperbolic(&g, &DegreeEmbedding::identity(5)).is_err());

        // isolated node → index 0
        let lonely = SyntheticGraph {
            family: Family::ErdosRenyi,
            hyper: Hyper::ErdosRenyi { p: 0.0 },
            nodes: 3,
            edges: vec![(0, 1)],
        };
        let fg = embed_degree_hyperbolic(&lonely, &DegreeEmbedding::identity(3)).unwrap();
        let s = 1.0f64.sinh();
        assert!((fg.channel(0).point(2)[0] - s).abs() < 1e-15);
        assert!((fg.channel(0).point(0)[1] - s).abs() < 1e-15);
    }

    #[test]
    fn onehot_spd() {
        assert_eq!(spd_capacity(15), 105);
        let g = graph(6);
        let fg = embed_onehot_spd(&g, 4).unwrap();
        let e = core::f64::consts::E;
        for v in 0..6 {
            let (vals, _) = sym_eigen(&from_row_major(4, fg.channel(0).point(v)));
            let mut vals: Vec<f64> = vals.iter().copied().collect();
            vals.sort_by(|a, b| a.total_cmp(b));
            for (got, want) in vals.iter().zip([1.0 / e, 1.0, 1.0, e]) {
                assert!((got - want).abs() < 1e-12);
            }
        }
        // first node: pair (0, 1) → [[cosh 1, sinh 1], [sinh 1, cosh 1]] block
        let p = fg.channel(0).point(0);
        assert!((p[0] - 1.0f64.cosh()).abs() < 1e-12 && (p[1] - 1.0f64.sinh()).abs() < 1e-12);
        assert!(matches!(
            embed_onehot_spd(&g, 3),
            Err(Error::CapacityExceeded {
                needed: 6,
                available: 3
            })
        ));
    }
}
