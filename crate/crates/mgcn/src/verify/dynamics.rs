use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::util::{cloud, rng, KINDS};
use super::{Check, Outcome, VerifyOptions};
use crate::error::Result;
use mgcn_core::dynamics::{
    check_containment, check_contraction, is_stationary, make_tetrahedron, make_wfm_stable_graph,
    Flow, CONTAINMENT_TOL,
};
use mgcn_core::graph::{bounding_ball_estimate, laplacian, normalize_weights, Edge};
use mgcn_core::layers::l_step_map;
use mgcn_core::manifold::random_point;
use mgcn_core::{FeatureGraph, ManifoldKind};

/// A random directed graph on the sphere with features in a cap of radius
/// 0.7 (well inside an open hemisphere) and weights normalized to Σw ≤ 1.
fn hemisphere_graph(rng: &mut ChaCha8Rng) -> FeatureGraph {
    let kind = ManifoldKind::Sphere(2);
    let n = rng.random_range(4..=10);
    let center = random_point(kind, rng);
    let map = cloud(&center, n, 0.7, rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && (b == (a + 1) % n || rng.random::<f64>() < 0.3) {
                edges.push(Edge {
                    from: a,
                    to: b,
                    weight: rng.random_range(0.1..1.0),
                });
            }
        }
    }
    normalize_weights(&FeatureGraph::new(n, edges, vec![map]).expect("valid graph"))
}

/// Ball containment for short times and under long integration, and
/// contraction of the diameter.
pub fn containment(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = rng(opts.seed, 5);
    let mut out = Outcome::default();
    let graphs = opts.count(50);
    let grid: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
    let t_end = match opts.scale {
        super::Scale::Full => 100.0,
        super::Scale::Quick => 10.0,
    };
    let (mut min_a, mut fine_excess, mut flow_excess) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut all_have_a, mut all_contract) = (true, true);
    for _ in 0..graphs {
        let g = hemisphere_graph(&mut rng);
        let steps = rng.random_range(1..=3);
        let report = check_containment(&g, 0, &grid, steps)?;
        let Some(a) = report.max_contained_t else {
            all_have_a = false;
            continue;
        };
        min_a = min_a.min(a);
        let (center, radius) = (report.center.coords().to_vec(), report.radius);
        let kind = report.center.kind();
        // re-check on random times in (0, a], off the sweep grid
        for _ in 0..10 {
            let t = a * (1.0 - rng.random::<f64>());
            let map = l_step_map(&g, g.channel(0), t, 0.0, steps)?;
            let d = map
                .points()
                .map(|p| kind.dist(&center, p))
                .fold(0.0, f64::max);
            fine_excess = fine_excess.max(d - radius);
            let (before, after) = check_contraction(&g, 0, t.min(a * 0.999), steps)?;
            all_contract &= after < before;
        }

        let (center, radius) = bounding_ball_estimate(&g, 0)?;
        let mut flow = Flow::new(&g, 0, t_end, 1e-2)?;
        while let Some(step) = flow.advance() {
            step?;
            let d = flow
                .state()
                .points()
                .map(|p| kind.dist(center.coords(), p))
                .fold(0.0, f64::max);
            flow_excess = flow_excess.max(d - radius);
        }
    }
    out.check(Check::holds(
        "every graph has a positive containment time a",
        all_have_a,
    ));
    out.check(Check::at_most(
        "ℓ-step outputs beyond the ball for t ≤ a",
        fine_excess,
        CONTAINMENT_TOL,
    ));
    out.check(Check::at_most(
        format!("flow (dt = 1e-2, T = {t_end}) beyond the initial ball"),
        flow_excess,
        CONTAINMENT_TOL,
    ));
    out.check(Check::holds(
        "diameter strictly shrinks for 0 < t < a",
        all_contract,
    ));
    out.note(format!(
        "{graphs} sphere graphs; sweep t = 0.05..1.0, ℓ ∈ {{1,2,3}}; smallest reported a = {min_a}"
    ));
    out.note("ball = geodesic ball centred at the Fréchet mean of the features with radius reaching the farthest feature");
    Ok(out)
}

/// Stationary configurations: the tetrahedron and graphs built from weighted Fréchet means.
pub fn stability(opts: &VerifyOptions) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = make_tetrahedron();
    let lap = laplacian(&g, 0)?;
    out.check(Check::below(
        "tetrahedron: max |Δf(v)|",
        lap.max_norm(g.channel(0)),
        1e-12,
    ));
    let mut flow = Flow::new(&g, 0, 10.0, 1e-2)?;
    while let Some(step) = flow.advance() {
        step?;
    }
    out.check(Check::below(
        "tetrahedron: drift after T = 10",
        flow.state().max_dist(g.channel(0)),
        1e-9,
    ));

    let per_kind = opts.count(10);
    let mut rng = rng(opts.seed, 6);
    for kind in KINDS {
        let mut all = true;
        for _ in 0..per_kind {
            let n = rng.random_range(6..=12);
            let g = make_wfm_stable_graph(kind, n, rng.random())?;
            all &= is_stationary(&g, 0, 1e-8);
        }
        out.check(Check::holds(
            format!(
                "{}: weighted-mean graphs are stationary (1e-8)",
                kind.name()
            ),
            all,
        ));
    }
    out.note(format!(
        "{per_kind} constructed weighted-mean graphs per manifold"
    ));
    Ok(out)
}
