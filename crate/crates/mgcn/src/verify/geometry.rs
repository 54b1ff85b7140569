use rand::Rng;

use super::util::{cloud, max_abs_diff, random_graph, rng, KINDS};
use super::{Check, Outcome, VerifyOptions};
use crate::error::Result;
use mgcn_core::graph::{laplacian, FeatureMap};
use mgcn_core::layers::step_map;
use mgcn_core::manifold::{
    frechet_mean, optimality_residual, random_isometry, random_point, random_tangent,
};
use mgcn_core::ManifoldKind;

/// exp/log/dist consistency and the commutation of exp and log with isometries.
pub fn round_trips(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = rng(opts.seed, 1);
    let mut out = Outcome::default();
    let cases = opts.count(200);
    for kind in KINDS {
        let (mut round, mut metric, mut geodesic, mut iso_exp, mut iso_log) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..cases {
            let p = random_point(kind, &mut rng);
            // on the sphere stay clear of the cut locus, where log is ill-conditioned
            let q = match kind {
                ManifoldKind::Sphere(_) => {
                    let x = random_tangent(&p, 2.5, &mut rng)?;
                    kind.exp(p.coords(), x.coords())
                }
                _ => random_point(kind, &mut rng).into_coords(),
            };
            let l = kind.log(p.coords(), &q)?;
            round = round.max(max_abs_diff(&kind.exp(p.coords(), &l), &q));
            metric = metric.max((kind.norm(p.coords(), &l) - kind.dist(p.coords(), &q)).abs());

            let x = random_tangent(&p, 1.0, &mut rng)?;
            let tau: f64 = rng.random();
            let y: Vec<f64> = x.coords().iter().map(|c| c * tau).collect();
            geodesic = geodesic
                .max((kind.dist(p.coords(), &kind.exp(p.coords(), &y)) - tau * x.norm()).abs());

            let phi = random_isometry(kind, &mut rng);
            let fp = phi.apply(p.coords());
            iso_exp = iso_exp.max(max_abs_diff(
                &kind.exp(&fp, &phi.push(x.coords())),
                &phi.apply(&kind.exp(p.coords(), x.coords())),
            ));
            iso_log = iso_log.max(max_abs_diff(&phi.push(&l), &kind.log(&fp, &phi.apply(&q))?));
        }
        let name = kind.name();
        out.check(Check::below(
            format!("{name}: |exp_p log_p q - q|"),
            round,
            1e-9,
        ));
        out.check(Check::below(
            format!("{name}: ||log_p q| - d(p,q)|"),
            metric,
            1e-9,
        ));
        out.check(Check::below(
            format!("{name}: |d(p, exp_p tX) - t|X||"),
            geodesic,
            1e-9,
        ));
        out.check(Check::below(
            format!("{name}: |phi(exp_p X) - exp_phi(p)(dphi X)|"),
            iso_exp,
            1e-9,
        ));
        out.check(Check::below(
            format!("{name}: |dphi log_p q - log_phi(p) phi(q)|"),
            iso_log,
            1e-9,
        ));
    }
    out.note(format!(
        "{cases} random cases per manifold; sphere pairs drawn within distance 2.5 of each other"
    ));
    Ok(out)
}

/// On Euclidean space the Laplacian and the step map reduce to their flat formulas.
pub fn euclidean_reduction(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = rng(opts.seed, 4);
    let mut out = Outcome::default();
    let (mut lap_err, mut step_err) = (0.0f64, 0.0f64);
    let cases = opts.count(100);
    for _ in 0..cases {
        let d = rng.random_range(1..=4);
        let kind = ManifoldKind::Euclidean(d);
        let n = rng.random_range(2..=12);
        let g = random_graph(kind, n, 1, 2.0, &mut rng);
        let f = g.channel(0);
        // flat Laplacian: L(v) = -Σ_u w(v,u) (f(u) - f(v))
        let mut flat = vec![0.0; n * d];
        for e in g.edges() {
            for k in 0..d {
                flat[e.from * d + k] -= e.weight * (f.point(e.to)[k] - f.point(e.from)[k]);
            }
        }
        let lap = laplacian(&g, 0)?;
        let lap_data: Vec<f64> = lap.vectors().flatten().copied().collect();
        lap_err = lap_err.max(max_abs_diff(&lap_data, &flat));

        let t = rng.random_range(0.0..1.5);
        let alpha = if rng.random_bool(0.5) {
            0.0
        } else {
            rng.random_range(0.0..0.5)
        };
        let mut expected = f.as_slice().to_vec();
        for v in 0..n {
            let l = &flat[v * d..(v + 1) * d];
            if alpha <= 0.0 || l.iter().map(|x| x * x).sum::<f64>().sqrt() >= alpha {
                for k in 0..d {
                    expected[v * d + k] -= t * l[k];
                }
            }
        }
        let stepped = step_map(&g, f, t, alpha)?;
        step_err = step_err.max(max_abs_diff(stepped.as_slice(), &expected));
    }
    out.check(Check::below("laplacian vs flat formula", lap_err, 1e-12));
    out.check(Check::below("step_map vs flat Euler step", step_err, 1e-12));
    out.note(format!("{cases} random graphs in Euclidean(1..4)"));
    Ok(out)
}

/// Optimality, Euclidean reduction and isometry equivariance of weighted Fréchet means.
pub fn frechet(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rng = rng(opts.seed, 7);
    let mut out = Outcome::default();
    let cases = opts.count(100);
    for kind in KINDS {
        let (mut residual, mut equivariance, mut flat) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..cases {
            let m = rng.random_range(2..=8);
            let center = random_point(kind, &mut rng);
            let pts = cloud(&center, m, 1.0, &mut rng);
            let refs: Vec<&[f64]> = pts.points().collect();
            let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
            let mean = frechet_mean(kind, &refs, &w)?;
            residual = residual.max(optimality_residual(kind, &mean, &refs, &w)?);

            let phi = random_isometry(kind, &mut rng);
            let moved: FeatureMap = pts.apply_isometry(&phi);
            let mrefs: Vec<&[f64]> = moved.points().collect();
            let mean2 = frechet_mean(kind, &mrefs, &w)?;
            equivariance = equivariance.max(kind.dist(&mean2, &phi.apply(&mean)));

            if let ManifoldKind::Euclidean(d) = kind {
                let total: f64 = w.iter().sum();
                let avg: Vec<f64> = (0..d)
                    .map(|k| refs.iter().zip(&w).map(|(p, wi)| wi * p[k]).sum::<f64>() / total)
                    .collect();
                flat = flat.max(max_abs_diff(&mean, &avg));
            }
        }
        let name = kind.name();
        out.check(Check::below(
            format!("{name}: optimality residual"),
            residual,
            1e-9,
        ));
        out.check(Check::below(
            format!("{name}: isometry equivariance"),
            equivariance,
            1e-8,
        ));
        if matches!(kind, ManifoldKind::Euclidean(_)) {
            out.check(Check::below("euclidean: weighted average", flat, 1e-12));
        }
    }
    out.note(format!(
        "{cases} random weighted point sets (2-8 points, spread 1.0) per manifold"
    ));
    Ok(out)
}
