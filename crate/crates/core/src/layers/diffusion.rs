use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{self, FeatureGraph, FeatureMap};
use crate::manifold::{ManifoldPoint, TangentVector};

/// Learnable state of a diffusion layer: one time and one threshold per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionLayerParams {
    pub times: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub steps: usize,
}

impl DiffusionLayerParams {
    pub fn new(times: Vec<f64>, thresholds: Vec<f64>, steps: usize) -> Result<Self> {
        let p = Self {
            times,
            thresholds,
            steps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn channels(&self) -> usize {
        self.times.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::InvalidParams(
                "diffusion layer needs at least one channel".into(),
            ));
        }
        if self.times.len() != self.thresholds.len() {
            return Err(Error::ShapeMismatch {
                expected: self.times.len(),
                found: self.thresholds.len(),
            });
        }
        if self.steps < 1 {
            return Err(Error::InvalidParams(
                "diffusion step count must be >= 1".into(),
            ));
        }
        if let Some(t) = self
            .times
            .iter()
            .chain(&self.thresholds)
            .find(|v| !(**v >= 0.0))
        {
            return Err(Error::InvalidParams(format!(
                "diffusion times and thresholds must be >= 0, got {t}"
            )));
        }
        Ok(())
    }
}

/// `σ_p^α(X)`: keeps `X` when `|X|_p ≥ α`, otherwise returns zero.
pub fn activate(p: &ManifoldPoint, x: &TangentVector, alpha: f64) -> Result<TangentVector> {
    if p.kind() != x.base().kind() {
        return Err(Error::KindMismatch {
            expected: p.kind(),
            found: x.base().kind(),
        });
    }
    if x.norm() >= alpha {
        Ok(x.clone())
    } else {
        Ok(TangentVector::zero(p.clone()))
    }
}

/// Slice form of [`activate`]; returns whether the vector was kept.
pub fn activate_in_place(kind: crate::ManifoldKind, p: &[f64], x: &mut [f64], alpha: f64) -> bool {
    if alpha <= 0.0 || kind.norm(p, x) >= alpha {
        return true;
    }
    x.iter_mut().for_each(|v| *v = 0.0);
    false
}

/// One activated explicit Euler step: `f(v) ← exp_{f(v)}(-t σ^α(Δf(v)))`.
pub fn step_map(g: &FeatureGraph, map: &FeatureMap, t: f64, alpha: f64) -> Result<FeatureMap> {
    step_with_label(g, map, t, alpha, 0, None)
}

fn step_with_label(
    g: &FeatureGraph,
    map: &FeatureMap,
    t: f64,
    alpha: f64,
    channel: usize,
    step: Option<usize>,
) -> Result<FeatureMap> {
    if t == 0.0 {
        return Ok(map.clone());
    }
    let kind = map.kind();
    let lap = graph::laplacian_of(g, map, channel).map_err(|e| match e {
        Error::EdgeCutLocus {
            from, to, channel, ..
        } => Error::EdgeCutLocus {
            from,
            to,
            channel,
            step,
        },
        other => other,
    })?;
    let mut out = map.clone();
    let mut velocity = kind.zero_tangent();
    for v in 0..map.len() {
        let p = map.point(v);
        velocity.copy_from_slice(lap.vector(v));
        if !activate_in_place(kind, p, &mut velocity, alpha) || velocity.iter().all(|c| *c == 0.0) {
            continue;
        }
        velocity.iter_mut().for_each(|c| *c *= -t);
        kind.exp_into(p, &velocity, out.point_mut(v));
    }
    Ok(out)
}

/// `step` composed `steps` times.
pub fn l_step_map(
    g: &FeatureGraph,
    map: &FeatureMap,
    t: f64,
    alpha: f64,
    steps: usize,
) -> Result<FeatureMap> {
    channel_l_step(g, map, t, alpha, steps, 0)
}

pub(crate) fn channel_l_step(
    g: &FeatureGraph,
    map: &FeatureMap,
    t: f64,
    alpha: f64,
    steps: usize,
    channel: usize,
) -> Result<FeatureMap> {
    let mut current = step_with_label(g, map, t, alpha, channel, Some(0))?;
    for k in 1..steps {
        current = step_with_label(g, &current, t, alpha, channel, Some(k))?;
    }
    Ok(current)
}

/// Diffuses channel `i` with `(t_i, α_i)` for `steps` steps. Negative
/// parameters (as produced by finite-difference probes) are clamped to zero.
pub fn diffusion_layer(g: &FeatureGraph, params: &DiffusionLayerParams) -> Result<FeatureGraph> {
    let channels = diffuse_channels(g, g.channels(), params)?;
    Ok(g.with_channels_unchecked(channels))
}

pub(crate) fn diffuse_channels(
    g: &FeatureGraph,
    inputs: &[FeatureMap],
    params: &DiffusionLayerParams,
) -> Result<Vec<FeatureMap>> {
    if inputs.len() != params.channels() {
        return Err(Error::ShapeMismatch {
            expected: params.channels(),
            found: inputs.len(),
        });
    }
    inputs
        .iter()
        .enumerate()
        .map(|(i, map)| {
            let t = params.times[i].max(0.0);
            let alpha = params.thresholds[i].max(0.0);
            channel_l_step(g, map, t, alpha, params.steps, i)
        })
        .collect()
}
