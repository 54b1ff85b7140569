use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mgcn_core::datagen::derive_seed;
use mgcn_core::graph::Edge;
use mgcn_core::layers::{InvariantCombine, InvariantMode};
use mgcn_core::manifold::{random_point, random_tangent};
use mgcn_core::train::{InvariantSpec, LayerSpec, ModelDescriptor};
use mgcn_core::{FeatureGraph, FeatureMap, ManifoldKind, ManifoldPoint};

pub const KINDS: [ManifoldKind; 4] = [
    ManifoldKind::Euclidean(3),
    ManifoldKind::Sphere(2),
    ManifoldKind::Lorentz(3),
    ManifoldKind::Spd(2),
];

/// Independent generator for a suite, so suites do not depend on run order.
pub fn rng(seed: u64, suite: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, suite))
}

/// `n` points within geodesic distance `spread` of `center`.
pub fn cloud(center: &ManifoldPoint, n: usize, spread: f64, rng: &mut ChaCha8Rng) -> FeatureMap {
    let kind = center.kind();
    let mut data = Vec::with_capacity(n * kind.ambient_dim());
    for _ in 0..n {
        let x = random_tangent(center, spread, rng).expect("positive spread");
        data.extend(kind.exp(center.coords(), x.coords()));
    }
    FeatureMap::new(kind, data).expect("points on the manifold")
}

/// Random directed graph containing a spanning path, with random positive
/// weights, optional weight scaling, and `channels` feature clouds.
pub fn random_graph(
    kind: ManifoldKind,
    n: usize,
    channels: usize,
    spread: f64,
    rng: &mut ChaCha8Rng,
) -> FeatureGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut push = |from: usize, to: usize, rng: &mut ChaCha8Rng| {
        if from != to && !edges.iter().any(|e: &Edge| e.from == from && e.to == to) {
            edges.push(Edge {
                from,
                to,
                weight: rng.random_range(0.05..0.5),
            });
        }
    };
    for w in order.windows(2) {
        push(w[0], w[1], rng);
        push(w[1], w[0], rng);
    }
    for _ in 0..n {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        push(a, b, rng);
    }
    let center = random_point(kind, rng);
    let maps = (0..channels)
        .map(|_| cloud(&center, n, spread, rng))
        .collect();
    FeatureGraph::new(n, edges, maps).expect("valid random graph")
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A small random architecture: one or two (diffusion, tMLP) pairs of
/// random widths, random steps and invariant modes.
pub fn random_descriptor(kind: ManifoldKind, rng: &mut ChaCha8Rng) -> ModelDescriptor {
    let pairs = rng.random_range(1..=2);
    let mut width = rng.random_range(2..=4);
    let mut layers = Vec::new();
    for _ in 0..pairs {
        layers.push(LayerSpec::Diffusion {
            channels: width,
            steps: rng.random_range(1..=2),
        });
        let hidden = rng.random_range(2..=4);
        let widths = if rng.random_bool(0.5) {
            vec![width, hidden]
        } else {
            vec![width, hidden, hidden]
        };
        width = hidden;
        layers.push(LayerSpec::Tmlp { widths });
    }
    ModelDescriptor {
        manifold: kind,
        layers,
        invariant: InvariantSpec {
            mode: if rng.random_bool(0.5) {
                InvariantMode::Shared
            } else {
                InvariantMode::PerChannel
            },
            combine: if rng.random_bool(0.5) {
                InvariantCombine::Difference
            } else {
                InvariantCombine::Pair
            },
        },
        head_hidden: rng.random_range(3..=6),
        classes: 3,
        covariates: 0,
        reference_channel: 0,
        nonlinearity: Default::default(),
        leaky_slope: 0.01,
        normalize_weights: true,
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
