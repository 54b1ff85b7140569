use mgcn_core::graph::{normalize_weights, Edge};
use mgcn_core::layers::{diffusion_layer, DiffusionLayerParams};
use mgcn_core::manifold::{frechet_mean, random_point, random_tangent};
use mgcn_core::train::{confusion_matrix, macro_f1, stratified_split, LayerSpec, ModelDescriptor};
use mgcn_core::{FeatureGraph, FeatureMap, ManifoldKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 3)
}

/// Hyperbolic distance through the Poincaré ball, independent of the
/// hyperboloid formulas.
fn poincare_dist(p: &[f64], q: &[f64]) -> f64 {
    let d = p.len() - 1;
    let ball = |x: &[f64]| -> Vec<f64> { x[..d].iter().map(|c| c / (1.0 + x[d])).collect() };
    let (u, v) = (ball(p), ball(q));
    let sq = |a: &[f64]| a.iter().map(|c| c * c).sum::<f64>();
    let diff: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
    (1.0 + 2.0 * sq(&diff) / ((1.0 - sq(&u)) * (1.0 - sq(&v)))).acosh()
}

fn small_graph(kind: ManifoldKind, n: usize, rng: &mut ChaCha8Rng) -> FeatureGraph {
    let mut edges = Vec::new();
    for v in 0..n {
        for u in 0..n {
            if u != v && (u + 1 == v || v + 1 == u || rng.random_bool(0.3)) {
                edges.push(Edge {
                    from: v,
                    to: u,
                    weight: rng.random_range(0.05..0.4),
                });
            }
        }
    }
    let center = random_point(kind, rng);
    let mut data = Vec::new();
    for _ in 0..n {
        let x = random_tangent(&center, 0.5, rng).unwrap();
        data.extend(kind.exp(center.coords(), x.coords()));
    }
    FeatureGraph::new(n, edges, vec![FeatureMap::new(kind, data).unwrap()]).unwrap()
}

proptest! {
    #[test]
    fn euclidean_maps_are_vector_arithmetic(p in vec3(), q in vec3()) {
        let k = ManifoldKind::Euclidean(3);
        let log = k.log(&p, &q).unwrap();
        for i in 0..3 {
            prop_assert!((log[i] - (q[i] - p[i])).abs() < 1e-12);
        }
        let exp = k.exp(&p, &log);
        for i in 0..3 {
            prop_assert!((exp[i] - q[i]).abs() < 1e-12);
        }
        let flat = ((0..3).map(|i| (q[i] - p[i]).powi(2)).sum::<f64>()).sqrt();
        prop_assert!((k.dist(&p, &q) - flat).abs() < 1e-12);
    }

    #[test]
    fn sphere_distance_is_the_angle(a in vec3(), b in vec3()) {
        let unit = |v: &[f64]| { let n = v.iter().map(|c| c * c).sum::<f64>().sqrt(); v.iter().map(|c| c / n).collect::<Vec<_>>() };
        prop_assume!(a.iter().map(|c| c * c).sum::<f64>() > 1e-2 && b.iter().map(|c| c * c).sum::<f64>() > 1e-2);
        let (p, q) = (unit(&a), unit(&b));
        let cos: f64 = p.iter().zip(&q).map(|(x, y)| x * y).sum();
        prop_assume!(cos > -0.99);
        let k = ManifoldKind::Sphere(2);
        prop_assert!((k.dist(&p, &q) - cos.clamp(-1.0, 1.0).acos()).abs() < 1e-7);
        let back = k.exp(&p, &k.log(&p, &q).unwrap());
        for i in 0..3 {
            prop_assert!((back[i] - q[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn lorentz_distance_matches_the_poincare_ball(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = ManifoldKind::Lorentz(3);
        let p = random_point(k, &mut rng);
        let q = random_point(k, &mut rng);
        let d = poincare_dist(p.coords(), q.coords());
        prop_assert!((k.dist(p.coords(), q.coords()) - d).abs() < 1e-8 * (1.0 + d));
    }

    #[test]
    fn spd_distance_of_diagonal_matrices(a in prop::collection::vec(0.1..10.0f64, 3), b in prop::collection::vec(0.1..10.0f64, 3)) {
        let k = ManifoldKind::Spd(3);
        let diag = |d: &[f64]| { let mut m = vec![0.0; 9]; for i in 0..3 { m[4 * i] = d[i]; } m };
        let expected = (0..3).map(|i| (a[i] / b[i]).ln().powi(2)).sum::<f64>().sqrt();
        prop_assert!((k.dist(&diag(&a), &diag(&b)) - expected).abs() < 1e-9);
    }

    #[test]
    fn euclidean_frechet_mean_is_the_weighted_average(points in prop::collection::vec(vec3(), 1..6), raw in prop::collection::vec(0.1..1.0f64, 6)) {
        let k = ManifoldKind::Euclidean(3);
        let w = &raw[..points.len()];
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
        let mean = frechet_mean(k, &refs, &w).unwrap();
        for i in 0..3 {
            let avg: f64 = points.iter().zip(&w).map(|(p, wi)| wi * p[i]).sum();
            prop_assert!((mean[i] - avg).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_normalization_is_idempotent(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = small_graph(ManifoldKind::Euclidean(2), n, &mut rng);
        let scale = rng.random_range(0.5..20.0);
        let edges: Vec<Edge> = g.edges().iter().map(|e| Edge { weight: e.weight * scale, ..*e }).collect();
        g = FeatureGraph::new(n, edges, g.channels().to_vec()).unwrap();
        let once = normalize_weights(&g);
        prop_assert!(once.max_weight_sum() <= 1.0 + 1e-12);
        prop_assert_eq!(&normalize_weights(&once), &once);
        let (a, b) = (&g.edges()[0], &g.edges()[g.edges().len() - 1]);
        let (a1, b1) = (&once.edges()[0], &once.edges()[once.edges().len() - 1]);
        prop_assert!((a.weight / b.weight - a1.weight / b1.weight).abs() < 1e-12 * (a.weight / b.weight));
    }

    #[test]
    fn diffusion_layer_commutes_with_node_permutation(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = small_graph(ManifoldKind::Sphere(2), n, &mut rng);
        let params = DiffusionLayerParams::new(vec![rng.random_range(0.1..1.0), 0.4], vec![0.0, 0.05], 2).unwrap();
        let g = g.with_channels(vec![g.channel(0).clone(), g.channel(0).clone()]).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let direct = diffusion_layer(&g.permute(&perm).unwrap(), &params).unwrap();
        let after = diffusion_layer(&g, &params).unwrap().permute(&perm).unwrap();
        prop_assert_eq!(direct.channels(), after.channels());
    }

    #[test]
    fn stratified_split_partitions_every_class(labels in prop::collection::vec(0usize..3, 6..60), seed in any::<u64>()) {
        let split = stratified_split(&labels, [4, 1, 1], seed).unwrap();
        let mut all: Vec<usize> = split.train.iter().chain(&split.validation).chain(&split.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for class in 0..3 {
            let m = labels.iter().filter(|&&l| l == class).count() as f64;
            let train = split.train.iter().filter(|&&i| labels[i] == class).count() as f64;
            prop_assert!((train - m * 4.0 / 6.0).abs() <= 1.0);
        }
    }

    #[test]
    fn macro_f1_is_one_exactly_for_perfect_predictions(labels in prop::collection::vec(0usize..3, 1..40), flip in 0usize..40) {
        let perfect = confusion_matrix(&labels, &labels, 3);
        prop_assert_eq!(macro_f1(&perfect), 1.0);
        let mut pred = labels.clone();
        let i = flip % labels.len();
        pred[i] = (pred[i] + 1) % 3;
        let f1 = macro_f1(&confusion_matrix(&labels, &pred, 3));
        prop_assert!((0.0..1.0).contains(&f1));
    }

    #[test]
    fn parameter_counts_follow_the_layer_formulas(c in 1usize..9, out in 1usize..9, hidden in 1usize..20, classes in 2usize..5) {
        let mut d = ModelDescriptor::synthetic(ManifoldKind::Lorentz(4), classes, 1);
        d.layers = vec![LayerSpec::Diffusion { channels: c, steps: 1 }, LayerSpec::Tmlp { widths: vec![c, out] }];
        d.head_hidden = hidden;
        let head_in = 2 * out;
        let expected = 2 * c + 2 * c * out + 2 * out + hidden * head_in + hidden + classes * hidden + classes;
        prop_assert_eq!(d.count_params(), expected);
    }
}
