use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, FeatureGraph, FeatureMap};
use crate::manifold::{
    frechet_mean_with, optimality_residual, random_point, random_tangent, FrechetOptions,
};
use crate::ManifoldKind;

const CONSTRUCTION_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 10_000;

/// Regular tetrahedron inscribed in S², complete graph with all weights 1/3.
pub fn make_tetrahedron() -> FeatureGraph {
    let s = 1.0 / 3.0f64.sqrt();
    let data = vec![s, s, s, s, -s, -s, -s, s, -s, -s, -s, s];
    let map = FeatureMap::new_unchecked(ManifoldKind::Sphere(2), data);
    let mut edges = Vec::with_capacity(12);
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                edges.push(Edge {
                    from: a,
                    to: b,
                    weight: 1.0 / 3.0,
                });
            }
        }
    }
    FeatureGraph::new(4, edges, vec![map]).expect("tetrahedron graph is valid")
}

/// A non-constant graph in which every node with out-edges sits at the
/// weighted Fréchet mean of its neighbours (out-weights summing to one), so
/// its Laplacian vanishes.
///
/// Roughly a third of the nodes (at least two) are sinks without out-edges;
/// they pin the configuration, the way boundary values pin a harmonic map.
/// The remaining nodes are placed by Gauss–Seidel sweeps, each node moved to
/// the weighted mean of its neighbours, until every mean residual is below 1e-10.
pub fn make_wfm_stable_graph(kind: ManifoldKind, n: usize, seed: u64) -> Result<FeatureGraph> {
    kind.validate()?;
    if n < 3 {
        return Err(Error::InvalidParams(alloc::format!(
            "stable graph needs n >= 3, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sinks = (n / 3).max(2);
    let center = random_point(kind, &mut rng);
    // small spread keeps all features well inside a convex ball on the sphere
    let mut points: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let x = random_tangent(&center, 0.6, &mut rng).expect("positive scale");
            kind.exp(center.coords(), x.coords())
        })
        .collect();

    let mut neighbours: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (v, list) in neighbours.iter_mut().enumerate().skip(sinks) {
        let extra = rng.random_range(1..=2.min(n - 2));
        let sink = rng.random_range(0..sinks);
        let mut others: Vec<usize> = (0..n).filter(|u| *u != v && *u != sink).collect();
        others.shuffle(&mut rng);
        let mut targets = vec![sink];
        targets.extend_from_slice(&others[..extra]);
        let raw: Vec<f64> = targets.iter().map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = raw.iter().sum();
        *list = targets
            .into_iter()
            .zip(raw)
            .map(|(u, w)| (u, w / total))
            .collect();
    }

    let opts = FrechetOptions::default();
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        for v in sinks..n {
            let pts: Vec<&[f64]> = neighbours[v]
                .iter()
                .map(|(u, _)| points[*u].as_slice())
                .collect();
            let w: Vec<f64> = neighbours[v].iter().map(|(_, w)| *w).collect();
            let mean = frechet_mean_with(kind, &pts, &w, Some(&points[v]), opts)?;
            points[v] = mean;
        }
        residual = 0.0;
        for v in sinks..n {
            let pts: Vec<&[f64]> = neighbours[v]
                .iter()
                .map(|(u, _)| points[*u].as_slice())
                .collect();
            let w: Vec<f64> = neighbours[v].iter().map(|(_, w)| *w).collect();
            residual = residual.max(optimality_residual(kind, &points[v], &pts, &w)?);
        }
        if residual < CONSTRUCTION_TOL {
            let edges = neighbours
                .iter()
                .enumerate()
                .flat_map(|(v, list)| {
                    list.iter().map(move |(u, w)| Edge {
                        from: v,
                        to: *u,
                        weight: *w,
                    })
                })
                .collect();
            let map = FeatureMap::new_unchecked(kind, points.concat());
            return FeatureGraph::new(n, edges, vec![map]);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_SWEEPS,
        residual,
    })
}
