use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::util::{random_descriptor, random_graph, random_permutation, rng, KINDS};
use super::{Check, Outcome, VerifyOptions};
use crate::error::Result;
use mgcn_core::graph::permute_map;
use mgcn_core::layers::{diffusion_layer, tmlp, Activation, DiffusionLayerParams, TmlpLayerParams};
use mgcn_core::manifold::random_isometry;
use mgcn_core::train::{forward, ModelParams};
use mgcn_core::{FeatureMap, ManifoldKind};

fn node_residual(a: &FeatureMap, b: &FeatureMap) -> f64 {
    let kind = a.kind();
    a.points()
        .zip(b.points())
        .map(|(p, q)| kind.dist(p, q))
        .fold(0.0, f64::max)
}

fn spread(kind: ManifoldKind) -> f64 {
    if matches!(kind, ManifoldKind::Sphere(_)) {
        0.6
    } else {
        1.0
    }
}

fn random_tmlp(c: usize, rng: &mut ChaCha8Rng) -> Vec<TmlpLayerParams> {
    let depth = rng.random_range(1..=2);
    let mut c_in = c;
    (0..depth)
        .map(|_| {
            let c_out = rng.random_range(1..=4);
            let mut w = || {
                (0..c_in * c_out)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect::<Vec<f64>>()
            };
            let (omega, xi) = (w(), w());
            let layer = TmlpLayerParams::new(c_in, c_out, omega, xi)
                .expect("consistent shapes")
                .with_activation(Activation::Relu);
            c_in = c_out;
            layer
        })
        .collect()
}

/// Diffusion layers and tMLPs commute with node permutations and isometries.
pub fn equivariance(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = rng(opts.seed, 2);
    let mut out = Outcome::default();
    let cases = opts.count(100);
    for kind in KINDS {
        let (mut diff_iso, mut tmlp_iso) = (0.0f64, 0.0f64);
        let mut exact = true;
        for _ in 0..cases {
            let n = rng.random_range(3..=10);
            let c = rng.random_range(1..=3);
            let g = random_graph(kind, n, c, spread(kind), &mut rng);
            let phi = random_isometry(kind, &mut rng);
            let perm = random_permutation(n, &mut rng);
            let moved = g.apply_isometry(&phi)?;
            let permuted = g.permute(&perm)?;

            let params = DiffusionLayerParams::new(
                (0..c).map(|_| rng.random_range(0.0..1.0)).collect(),
                (0..c)
                    .map(|_| {
                        if rng.random_bool(0.3) {
                            rng.random_range(0.0..0.3)
                        } else {
                            0.0
                        }
                    })
                    .collect(),
                rng.random_range(1..=3),
            )?;
            let base = diffusion_layer(&g, &params)?;
            let on_moved = diffusion_layer(&moved, &params)?;
            let on_permuted = diffusion_layer(&permuted, &params)?;
            for k in 0..c {
                diff_iso = diff_iso.max(node_residual(
                    on_moved.channel(k),
                    &base.channel(k).apply_isometry(&phi),
                ));
                exact &= on_permuted.channel(k) == &permute_map(base.channel(k), &perm);
            }

            let layers = random_tmlp(c, &mut rng);
            let base = tmlp(g.channels(), &layers, 0)?;
            let on_moved = tmlp(moved.channels(), &layers, 0)?;
            let on_permuted = tmlp(permuted.channels(), &layers, 0)?;
            for (k, b) in base.iter().enumerate() {
                tmlp_iso = tmlp_iso.max(node_residual(&on_moved[k], &b.apply_isometry(&phi)));
                exact &= on_permuted[k] == permute_map(b, &perm);
            }
        }
        let name = kind.name();
        out.check(Check::below(
            format!("{name}: diffusion isometry residual"),
            diff_iso,
            1e-9,
        ));
        out.check(Check::below(
            format!("{name}: tMLP isometry residual"),
            tmlp_iso,
            1e-9,
        ));
        out.check(Check::holds(
            format!("{name}: permutation equivariance is exact"),
            exact,
        ));
    }
    out.note(format!("{cases} random (graph, isometry, parameters) triples per manifold; residuals are geodesic distances"));
    Ok(out)
}

/// The full network is invariant under node relabeling and under isometries of the inputs.
pub fn invariance(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = rng(opts.seed, 3);
    let mut out = Outcome::default();
    let (models, graphs) = (opts.count(50), 10);
    let (mut perm_res, mut iso_res) = (0.0f64, 0.0f64);
    for m in 0..models {
        let kind = KINDS[m % KINDS.len()];
        let params = ModelParams::init(random_descriptor(kind, &mut rng), rng.random())?;
        for _ in 0..graphs {
            let n = rng.random_range(3..=9);
            let g = random_graph(kind, n, 1, spread(kind), &mut rng);
            let base = forward(&params, &g)?;
            let permuted = forward(&params, &g.permute(&random_permutation(n, &mut rng))?)?;
            let moved = forward(
                &params,
                &g.apply_isometry(&random_isometry(kind, &mut rng))?,
            )?;
            for k in 0..base.len() {
                perm_res = perm_res.max((base[k] - permuted[k]).abs());
                iso_res = iso_res.max((base[k] - moved[k]).abs());
            }
        }
    }
    out.check(Check::below(
        "log-probability change under node permutation",
        perm_res,
        1e-8,
    ));
    out.check(Check::below(
        "log-probability change under isometry",
        iso_res,
        1e-8,
    ));
    out.note(format!(
        "{models} random models (cycling through four manifolds) × {graphs} graphs"
    ));
    Ok(out)
}
