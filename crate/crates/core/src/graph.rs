//! Manifold-valued feature graphs and the graph Laplacian
//! `Δf(v) = -Σ_{u~v} w(v,u) log_{f(v)} f(u)`.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{self, FrechetOptions, Isometry, ManifoldKind, ManifoldPoint};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// One feature channel: `n` points of a single manifold, stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap {
    kind: ManifoldKind,
    data: Vec<f64>,
}

impl FeatureMap {
    /// Builds a channel from flat ambient coordinates, validating every point.
    pub fn new(kind: ManifoldKind, data: Vec<f64>) -> Result<Self> {
        kind.validate()?;
        let stride = kind.ambient_dim();
        if data.len() % stride != 0 {
            return Err(Error::ShapeMismatch {
                expected: stride * (data.len() / stride + 1),
                found: data.len(),
            });
        }
        for p in data.chunks(stride) {
            kind.check_point(p)?;
        }
        Ok(Self { kind, data })
    }

    pub fn from_points(kind: ManifoldKind, points: &[ManifoldPoint]) -> Result<Self> {
        let mut data = Vec::with_capacity(points.len() * kind.ambient_dim());
        for p in points {
            if p.kind() != kind {
                return Err(Error::KindMismatch {
                    expected: kind,
                    found: p.kind(),
                });
            }
            data.extend_from_slice(p.coords());
        }
        Ok(Self { kind, data })
    }

    pub(crate) fn new_unchecked(kind: ManifoldKind, data: Vec<f64>) -> Self {
        Self { kind, data }
    }

    /// `n` copies of one point.
    pub fn constant(kind: ManifoldKind, point: &[f64], n: usize) -> Self {
        let mut data = Vec::with_capacity(n * point.len());
        for _ in 0..n {
            data.extend_from_slice(point);
        }
        Self { kind, data }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.kind.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, v: usize) -> &[f64] {
        let s = self.kind.ambient_dim();
        &self.data[v * s..(v + 1) * s]
    }

    pub fn point_mut(&mut self, v: usize) -> &mut [f64] {
        let s = self.kind.ambient_dim();
        &mut self.data[v * s..(v + 1) * s]
    }

    pub fn points(&self) -> core::slice::Chunks<'_, f64> {
        self.data.chunks(self.kind.ambient_dim())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> FeatureMap {
        let mut data = Vec::with_capacity(self.data.len());
        for p in self.points() {
            data.extend(f(p));
        }
        FeatureMap {
            kind: self.kind,
            data,
        }
    }

    pub fn apply_isometry(&self, phi: &Isometry) -> FeatureMap {
        self.map_points(|p| phi.apply(p))
    }

    /// Largest geodesic distance between corresponding points.
    pub fn max_dist(&self, other: &FeatureMap) -> f64 {
        self.points()
            .zip(other.points())
            .map(|(a, b)| self.kind.dist(a, b))
            .fold(0.0, f64::max)
    }
}

/// One tangent vector per node, based at that node's feature.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentField {
    kind: ManifoldKind,
    data: Vec<f64>,
}

impl TangentField {
    pub fn zeros(kind: ManifoldKind, n: usize) -> Self {
        Self {
            kind,
            data: vec![0.0; n * kind.ambient_dim()],
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.kind.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, v: usize) -> &[f64] {
        let s = self.kind.ambient_dim();
        &self.data[v * s..(v + 1) * s]
    }

    pub fn vectors(&self) -> core::slice::Chunks<'_, f64> {
        self.data.chunks(self.kind.ambient_dim())
    }

    /// Largest Riemannian norm over nodes.
    pub fn max_norm(&self, base: &FeatureMap) -> f64 {
        self.vectors()
            .zip(base.points())
            .map(|(x, p)| self.kind.norm(p, x))
            .fold(0.0, f64::max)
    }
}

/// A directed, positively weighted graph with `c` channels of manifold-valued
/// node features.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureGraph {
    nodes: usize,
    edges: Vec<Edge>,
    channels: Vec<FeatureMap>,
    pub label: Option<usize>,
    /// Graph-level scalar inputs appended after pooling (e.g. a volume).
    pub covariates: Vec<f64>,
}

impl FeatureGraph {
    /// Validates the structure: positive finite weights, indices in range,
    /// no self-loops or repeated edges, and channels of `nodes` points of one
    /// manifold kind.
    pub fn new(nodes: usize, edges: Vec<Edge>, channels: Vec<FeatureMap>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.from >= nodes || e.to >= nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({} -> {}) out of range",
                    e.from, e.to
                )));
            }
            if e.from == e.to {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} is a self-loop at node {}",
                    e.from
                )));
            }
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} has non-positive weight {}",
                    e.weight
                )));
            }
            if !seen.insert((e.from, e.to)) {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({} -> {}) is repeated",
                    e.from, e.to
                )));
            }
        }
        if let Some(first) = channels.first() {
            for (c, ch) in channels.iter().enumerate() {
                if ch.kind != first.kind {
                    return Err(Error::KindMismatch {
                        expected: first.kind,
                        found: ch.kind,
                    });
                }
                if ch.len() != nodes {
                    return Err(Error::InvalidGraph(format!(
                        "channel {c} has {} points for {nodes} nodes",
                        ch.len()
                    )));
                }
            }
        }
        Ok(Self {
            nodes,
            edges,
            channels,
            label: None,
            covariates: Vec::new(),
        })
    }

    /// Expands undirected pairs to both directions with a uniform weight.
    pub fn from_undirected(
        nodes: usize,
        pairs: &[(usize, usize)],
        weight: f64,
        channels: Vec<FeatureMap>,
    ) -> Result<Self> {
        let edges = pairs
            .iter()
            .flat_map(|&(a, b)| {
                [
                    Edge {
                        from: a,
                        to: b,
                        weight,
                    },
                    Edge {
                        from: b,
                        to: a,
                        weight,
                    },
                ]
            })
            .collect();
        Self::new(nodes, edges, channels)
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_covariates(mut self, covariates: Vec<f64>) -> Self {
        self.covariates = covariates;
        self
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn channels(&self) -> &[FeatureMap] {
        &self.channels
    }

    pub fn channel(&self, i: usize) -> &FeatureMap {
        &self.channels[i]
    }

    pub fn kind(&self) -> Option<ManifoldKind> {
        self.channels.first().map(|c| c.kind)
    }

    /// Same structure, new features.
    pub fn with_channels(&self, channels: Vec<FeatureMap>) -> Result<Self> {
        let mut g = Self::new(self.nodes, self.edges.clone(), channels)?;
        g.label = self.label;
        g.covariates = self.covariates.clone();
        Ok(g)
    }

    pub(crate) fn with_channels_unchecked(&self, channels: Vec<FeatureMap>) -> Self {
        Self {
            nodes: self.nodes,
            edges: self.edges.clone(),
            channels,
            label: self.label,
            covariates: self.covariates.clone(),
        }
    }

    /// Out-degree of every node.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for e in &self.edges {
            d[e.from] += 1;
        }
        d
    }

    /// Number of undirected neighbours of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut sets = vec![BTreeSet::new(); self.nodes];
        for e in &self.edges {
            sets[e.from].insert(e.to);
            sets[e.to].insert(e.from);
        }
        sets.iter().map(|s| s.len()).collect()
    }

    /// `max_v Σ_{u~v} w(v,u)`
    pub fn max_weight_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.nodes];
        for e in &self.edges {
            sums[e.from] += e.weight;
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Relabels nodes: node `v` becomes node `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nodes {
            return Err(Error::ShapeMismatch {
                expected: self.nodes,
                found: perm.len(),
            });
        }
        let mut check = vec![false; self.nodes];
        for &p in perm {
            if p >= self.nodes || core::mem::replace(&mut check[p], true) {
                return Err(Error::InvalidParams("not a permutation".into()));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: perm[e.from],
                to: perm[e.to],
                weight: e.weight,
            })
            .collect();
        let channels = self.channels.iter().map(|c| permute_map(c, perm)).collect();
        let mut g = Self::new(self.nodes, edges, channels)?;
        g.label = self.label;
        g.covariates = self.covariates.clone();
        Ok(g)
    }

    pub fn apply_isometry(&self, phi: &Isometry) -> Result<Self> {
        if let Some(kind) = self.kind() {
            if kind != phi.kind() {
                return Err(Error::KindMismatch {
                    expected: kind,
                    found: phi.kind(),
                });
            }
        }
        Ok(self.with_channels_unchecked(
            self.channels
                .iter()
                .map(|c| c.apply_isometry(phi))
                .collect(),
        ))
    }

    /// Hop distance from `source` following directed edges backwards, i.e. the
    /// set of nodes whose features can influence `source`.
    pub fn hops_to(&self, source: usize) -> Vec<Option<usize>> {
        let mut incoming = vec![Vec::new(); self.nodes];
        for e in &self.edges {
            incoming[e.from].push(e.to);
        }
        let mut dist = vec![None; self.nodes];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &incoming[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

/// Node `v`'s feature moves to position `perm[v]`.
pub fn permute_map(map: &FeatureMap, perm: &[usize]) -> FeatureMap {
    let s = map.kind.ambient_dim();
    let mut data = vec![0.0; map.data.len()];
    for (v, &p) in perm.iter().enumerate() {
        data[p * s..(p + 1) * s].copy_from_slice(map.point(v));
    }
    FeatureMap {
        kind: map.kind,
        data,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdmissibilityReport {
    /// `(edge index, channel)` pairs whose logarithm is undefined.
    pub violations: Vec<(usize, usize)>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_admissible(g: &FeatureGraph) -> AdmissibilityReport {
    let mut violations = Vec::new();
    for (c, ch) in g.channels.iter().enumerate() {
        violations.extend(admissibility_violations(g, ch).into_iter().map(|i| (i, c)));
    }
    AdmissibilityReport { violations }
}

pub(crate) fn admissibility_violations(g: &FeatureGraph, map: &FeatureMap) -> Vec<usize> {
    if map.kind.is_hadamard() {
        return Vec::new();
    }
    g.edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !map.kind.log_defined(map.point(e.from), map.point(e.to)))
        .map(|(i, _)| i)
        .collect()
}

/// Graph Laplacian of one channel. Nodes without out-edges get the zero vector.
pub fn laplacian(g: &FeatureGraph, channel: usize) -> Result<TangentField> {
    laplacian_of(g, &g.channels[channel], channel)
}

/// Laplacian of an arbitrary feature map over `g`'s edges; `channel` only
/// labels errors.
pub fn laplacian_of(g: &FeatureGraph, map: &FeatureMap, channel: usize) -> Result<TangentField> {
    let kind = map.kind;
    let s = kind.ambient_dim();
    let mut out = TangentField::zeros(kind, g.nodes);
    let mut scratch = vec![0.0; s];
    for e in &g.edges {
        kind.log_into(map.point(e.from), map.point(e.to), &mut scratch)
            .map_err(|_| Error::EdgeCutLocus {
                from: e.from,
                to: e.to,
                channel,
                step: None,
            })?;
        let target = &mut out.data[e.from * s..(e.from + 1) * s];
        crate::linalg::axpy(-e.weight, &scratch, target);
    }
    Ok(out)
}

/// Divides all weights by `b = max_v Σ_{u~v} w(v,u)` when `b > 1`. Sums
/// within rounding of one are left alone, which keeps the map idempotent.
pub fn normalize_weights(g: &FeatureGraph) -> FeatureGraph {
    let b = g.max_weight_sum();
    let mut out = g.clone();
    if b > 1.0 + 1e-12 {
        for e in &mut out.edges {
            e.weight /= b;
        }
    }
    out
}

/// `max_{v,u} dist(f(v), f(u))`
pub fn graph_diameter(g: &FeatureGraph, channel: usize) -> f64 {
    map_diameter(&g.channels[channel])
}

pub fn map_diameter(map: &FeatureMap) -> f64 {
    let n = map.len();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            best = best.max(map.kind.dist(map.point(i), map.point(j)));
        }
    }
    best
}

/// An enclosing geodesic ball centred at the unweighted Fréchet mean of the
/// features. It contains every feature but need not be the smallest such ball.
pub fn bounding_ball_estimate(g: &FeatureGraph, channel: usize) -> Result<(ManifoldPoint, f64)> {
    let map = &g.channels[channel];
    if map.is_empty() {
        return Err(Error::Empty("bounding ball of an empty graph"));
    }
    let points: Vec<&[f64]> = map.points().collect();
    let weights = vec![1.0; points.len()];
    let center =
        manifold::frechet_mean_with(map.kind, &points, &weights, None, FrechetOptions::default())?;
    let radius = points
        .iter()
        .map(|p| map.kind.dist(&center, p))
        .fold(0.0, f64::max);
    Ok((ManifoldPoint::new_unchecked(map.kind, center), radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::manifold::{random_isometry, random_point, random_tangent};
    use core::f64::consts::PI;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(values: &[f64]) -> FeatureMap {
        FeatureMap::new(ManifoldKind::Euclidean(1), values.to_vec()).unwrap()
    }

    fn random_graph(kind: ManifoldKind, n: usize, rng: &mut ChaCha8Rng) -> FeatureGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.random::<f64>() < 0.4 {
                    edges.push(Edge {
                        from: a,
                        to: b,
                        weight: rng.random_range(0.1..1.0),
                    });
                }
            }
        }
        let center = random_point(kind, rng);
        let mut data = Vec::new();
        for _ in 0..n {
            let x = random_tangent(&center, 1.0, rng).unwrap();
            data.extend(kind.exp(center.coords(), x.coords()));
        }
        FeatureGraph::new(n, edges, vec![FeatureMap::new_unchecked(kind, data)]).unwrap()
    }

    #[test]
    fn structural_validation() {
        let ch = || vec![line(&[0.0, 1.0])];
        assert!(FeatureGraph::new(
            2,
            vec![Edge {
                from: 0,
                to: 0,
                weight: 1.0
            }],
            ch()
        )
        .is_err());
        assert!(FeatureGraph::new(
            2,
            vec![Edge {
                from: 0,
                to: 2,
                weight: 1.0
            }],
            ch()
        )
        .is_err());
        assert!(FeatureGraph::new(
            2,
            vec![Edge {
                from: 0,
                to: 1,
                weight: 0.0
            }],
            ch()
        )
        .is_err());
        let dup = vec![
            Edge {
                from: 0,
                to: 1,
                weight: 1.0,
            },
            Edge {
                from: 0,
                to: 1,
                weight: 2.0,
            },
        ];
        assert!(FeatureGraph::new(2, dup, ch()).is_err());
        assert!(FeatureGraph::new(3, vec![], ch()).is_err());
        let mixed = vec![
            line(&[0.0, 1.0]),
            FeatureMap::constant(ManifoldKind::Euclidean(2), &[0.0, 0.0], 2),
        ];
        assert!(FeatureGraph::new(2, vec![], mixed).is_err());
    }

    #[test]
    fn admissibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_graph(ManifoldKind::Lorentz(3), 6, &mut rng);
        assert!(validate_admissible(&g).is_admissible());

        let s = ManifoldKind::Sphere(2);
        let map = FeatureMap::new(s, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0]).unwrap();
        let g = FeatureGraph::from_undirected(3, &[(0, 1), (0, 2)], 0.5, vec![map]).unwrap();
        let report = validate_admissible(&g);
        assert_eq!(report.violations, vec![(0, 0), (1, 0)]);
        assert!(matches!(
            laplacian(&g, 0),
            Err(Error::EdgeCutLocus {
                from: 0,
                to: 1,
                channel: 0,
                ..
            })
        ));

        let empty = FeatureGraph::new(
            3,
            vec![],
            vec![FeatureMap::new(s, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0]).unwrap()],
        )
        .unwrap();
        assert!(validate_admissible(&empty).is_admissible());
    }

    #[test]
    fn laplacian_examples() {
        let kind = ManifoldKind::Sphere(2);
        let c = FeatureMap::constant(kind, &[0.0, 1.0, 0.0], 4);
        let g = FeatureGraph::from_undirected(4, &[(0, 1), (1, 2), (2, 3)], 1.0, vec![c]).unwrap();
        assert!(laplacian(&g, 0)
            .unwrap()
            .vectors()
            .all(|x| x.iter().all(|v| *v == 0.0)));

        let g = FeatureGraph::new(
            2,
            vec![Edge {
                from: 0,
                to: 1,
                weight: 1.0,
            }],
            vec![line(&[0.0, 2.0])],
        )
        .unwrap();
        let l = laplacian(&g, 0).unwrap();
        assert_eq!(l.vector(0), &[-2.0]);
        assert_eq!(l.vector(1), &[0.0]);
    }

    #[test]
    fn laplacian_reduces_to_weighted_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let kind = ManifoldKind::Euclidean(3);
        for _ in 0..20 {
            let g = random_graph(kind, 7, &mut rng);
            let l = laplacian(&g, 0).unwrap();
            let f = g.channel(0);
            for v in 0..7 {
                let mut expected = [0.0; 3];
                for e in g.edges().iter().filter(|e| e.from == v) {
                    for k in 0..3 {
                        expected[k] -= e.weight * (f.point(e.to)[k] - f.point(v)[k]);
                    }
                }
                assert!(max_abs_diff(l.vector(v), &expected) < 1e-12);
            }
        }
    }

    #[test]
    fn laplacian_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for kind in [
            ManifoldKind::Euclidean(2),
            ManifoldKind::Sphere(2),
            ManifoldKind::Lorentz(3),
            ManifoldKind::Spd(2),
        ] {
            let g = random_graph(kind, 6, &mut rng);
            let l = laplacian(&g, 0).unwrap();

            let mut perm: Vec<usize> = (0..6).collect();
            perm.shuffle(&mut rng);
            let lp = laplacian(&g.permute(&perm).unwrap(), 0).unwrap();
            for v in 0..6 {
                assert_eq!(lp.vector(perm[v]), l.vector(v), "{kind:?}");
            }

            let phi = random_isometry(kind, &mut rng);
            let li = laplacian(&g.apply_isometry(&phi).unwrap(), 0).unwrap();
            for v in 0..6 {
                let pushed = phi.push(l.vector(v));
                let scale = 1.0 + crate::linalg::norm2(&pushed);
                assert!(
                    max_abs_diff(li.vector(v), &pushed) < 1e-9 * scale,
                    "{kind:?}"
                );
            }

            let mut shuffled = g.edges().to_vec();
            shuffled.shuffle(&mut rng);
            let gs = FeatureGraph::new(6, shuffled, g.channels().to_vec()).unwrap();
            let ls = laplacian(&gs, 0).unwrap();
            for v in 0..6 {
                assert!(max_abs_diff(ls.vector(v), l.vector(v)) < 1e-12);
            }
        }
    }

    #[test]
    fn weight_normalization() {
        let g =
            FeatureGraph::from_undirected(3, &[(0, 1)], 0.5, vec![line(&[0.0, 1.0, 2.0])]).unwrap();
        assert_eq!(normalize_weights(&g), g);

        let star = FeatureGraph::new(
            5,
            (1..5)
                .map(|to| Edge {
                    from: 0,
                    to,
                    weight: 1.0,
                })
                .collect(),
            vec![line(&[0.0, 1.0, 2.0, 3.0, 4.0])],
        )
        .unwrap();
        let n = normalize_weights(&star);
        assert!(n.edges().iter().all(|e| e.weight == 0.25));

        let pairs: Vec<(usize, usize)> = (0..99).map(|i| (i, i + 1)).collect();
        let hundred =
            FeatureGraph::from_undirected(100, &pairs, 1.0 / 100.0, vec![line(&[0.0; 100])])
                .unwrap();
        assert_eq!(normalize_weights(&hundred), hundred);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_graph(ManifoldKind::Euclidean(1), 8, &mut rng);
        let once = normalize_weights(&g);
        assert!(once.max_weight_sum() <= 1.0 + 1e-15);
        assert_eq!(normalize_weights(&once), once);
        let b = g.max_weight_sum();
        for (a, e) in g.edges().iter().zip(once.edges()) {
            assert_eq!(e.weight, a.weight / b);
        }
    }

    #[test]
    fn diameters() {
        let c = FeatureMap::constant(ManifoldKind::Sphere(2), &[0.0, 0.0, 1.0], 3);
        let g = FeatureGraph::new(3, vec![], vec![c]).unwrap();
        assert_eq!(graph_diameter(&g, 0), 0.0);

        let g = FeatureGraph::new(2, vec![], vec![line(&[0.0, 3.0])]).unwrap();
        assert_eq!(graph_diameter(&g, 0), 3.0);

        let r = 1.0 / 3.0f64.sqrt();
        let tet = [r, r, r, r, -r, -r, -r, r, -r, -r, -r, r];
        let g = FeatureGraph::new(
            4,
            vec![],
            vec![FeatureMap::new(ManifoldKind::Sphere(2), tet.to_vec()).unwrap()],
        )
        .unwrap();
        assert!((graph_diameter(&g, 0) - (-1.0f64 / 3.0).acos()).abs() < 1e-14);
    }

    #[test]
    fn bounding_balls() {
        let single = FeatureGraph::new(1, vec![], vec![line(&[4.0])]).unwrap();
        let (_, r) = bounding_ball_estimate(&single, 0).unwrap();
        assert_eq!(r, 0.0);

        let two = FeatureGraph::new(2, vec![], vec![line(&[1.0, 5.0])]).unwrap();
        let (c, r) = bounding_ball_estimate(&two, 0).unwrap();
        assert!((c.coords()[0] - 3.0).abs() < 1e-14);
        assert!((r - 2.0).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let kind = ManifoldKind::Sphere(2);
        let north = kind.origin();
        for _ in 0..20 {
            // features within 1.4 rad of the north pole lie in an open hemisphere
            let mut data = Vec::new();
            for _ in 0..8 {
                let x = random_tangent(&ManifoldPoint::origin(kind), 1.4, &mut rng).unwrap();
                data.extend(kind.exp(&north, x.coords()));
            }
            let g =
                FeatureGraph::new(8, vec![], vec![FeatureMap::new(kind, data).unwrap()]).unwrap();
            let (c, r) = bounding_ball_estimate(&g, 0).unwrap();
            assert!(r < PI / 2.0);
            for p in g.channel(0).points() {
                assert!(kind.dist(c.coords(), p) <= r);
            }
        }
    }

    #[test]
    fn hop_distances() {
        let g =
            FeatureGraph::from_undirected(4, &[(0, 1), (1, 2), (2, 3)], 1.0, vec![line(&[0.0; 4])])
                .unwrap();
        assert_eq!(g.hops_to(0), vec![Some(0), Some(1), Some(2), Some(3)]);
    }
}
