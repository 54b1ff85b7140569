use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeatureMap;
use crate::manifold::{frechet_mean_with, FrechetOptions};

/// How many pairs of weighted means the layer learns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantMode {
    /// Each output channel has its own two weight vectors (`2·c·c` logits).
    #[default]
    PerChannel,
    /// One pair of weighted means shared by every output channel (`2·c` logits).
    Shared,
}

/// How the two distances of a channel are turned into features.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantCombine {
    /// `d(f_j, μ_1) − d(f_j, μ_2)`: one scalar per channel.
    #[default]
    Difference,
    /// Both distances: two scalars per channel.
    Pair,
}

impl InvariantCombine {
    pub fn width(&self, channels: usize) -> usize {
        match self {
            InvariantCombine::Difference => channels,
            InvariantCombine::Pair => 2 * channels,
        }
    }
}

/// Unconstrained logits for the weighted means; weights are their softmax.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantLayerParams {
    pub channels: usize,
    pub mode: InvariantMode,
    pub combine: InvariantCombine,
    /// `groups × channels` row-major, one row per mean group.
    pub logits_first: Vec<f64>,
    pub logits_second: Vec<f64>,
}

impl InvariantLayerParams {
    /// All logits zero, i.e. uniform weights.
    pub fn uniform(channels: usize, mode: InvariantMode, combine: InvariantCombine) -> Self {
        let len = Self::logit_count(channels, mode);
        Self {
            channels,
            mode,
            combine,
            logits_first: vec![0.0; len],
            logits_second: vec![0.0; len],
        }
    }

    /// Length of each of the two logit arrays.
    pub fn logit_count(channels: usize, mode: InvariantMode) -> usize {
        match mode {
            InvariantMode::PerChannel => channels * channels,
            InvariantMode::Shared => channels,
        }
    }

    pub fn groups(&self) -> usize {
        match self.mode {
            InvariantMode::PerChannel => self.channels,
            InvariantMode::Shared => 1,
        }
    }

    pub fn output_width(&self) -> usize {
        self.combine.width(self.channels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 {
            return Err(Error::InvalidParams(
                "invariant layer needs at least one channel".into(),
            ));
        }
        let len = Self::logit_count(self.channels, self.mode);
        for l in [&self.logits_first, &self.logits_second] {
            if l.len() != len {
                return Err(Error::ShapeMismatch {
                    expected: len,
                    found: l.len(),
                });
            }
            if l.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParams(
                    "invariant logits must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// Softmaxed weights of group `g`: `(first, second)`.
    pub fn weights(&self, group: usize) -> (Vec<f64>, Vec<f64>) {
        let c = self.channels;
        let range = group * c..(group + 1) * c;
        (
            softmax(&self.logits_first[range.clone()]),
            softmax(&self.logits_second[range]),
        )
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Scalar features per node from distances to two weighted Fréchet means of
/// the node's channel features. Returns `output_width()` rows of `n` values.
pub fn invariant_layer(
    features: &[FeatureMap],
    params: &InvariantLayerParams,
) -> Result<Vec<Vec<f64>>> {
    invariant_layer_warm(features, params, None).map(|(out, _)| out)
}

/// Like [`invariant_layer`], also returning the Fréchet means (per node, per
/// group: first then second) and optionally starting the mean iterations
/// from a previous result of the same shape.
pub(crate) fn invariant_layer_warm(
    features: &[FeatureMap],
    params: &InvariantLayerParams,
    warm: Option<&[Vec<f64>]>,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    params.validate()?;
    if features.len() != params.channels {
        return Err(Error::ShapeMismatch {
            expected: params.channels,
            found: features.len(),
        });
    }
    let kind = features[0].kind();
    let n = features[0].len();
    for f in features {
        if f.kind() != kind {
            return Err(Error::KindMismatch {
                expected: kind,
                found: f.kind(),
            });
        }
        if f.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: f.len(),
            });
        }
    }
    let c = params.channels;
    let groups = params.groups();
    let warm = warm.filter(|w| w.len() == 2 * groups * n);
    let weights: Vec<_> = (0..groups).map(|g| params.weights(g)).collect();
    let mut out = vec![vec![0.0; n]; params.output_width()];
    let opts = FrechetOptions::default();
    let mut means = Vec::with_capacity(2 * groups * n);
    for v in 0..n {
        let points: Vec<&[f64]> = features.iter().map(|f| f.point(v)).collect();
        for (g, (w1, w2)) in weights.iter().enumerate() {
            let slot = 2 * (v * groups + g);
            let start = |k: usize| warm.map(|w| w[slot + k].as_slice());
            means.push(frechet_mean_with(kind, &points, w1, start(0), opts)?);
            means.push(frechet_mean_with(kind, &points, w2, start(1), opts)?);
        }
        for j in 0..c {
            let g = if params.mode == InvariantMode::Shared {
                0
            } else {
                j
            };
            let slot = 2 * (v * groups + g);
            let d1 = kind.dist(points[j], &means[slot]);
            let d2 = kind.dist(points[j], &means[slot + 1]);
            match params.combine {
                InvariantCombine::Difference => out[j][v] = d1 - d2,
                InvariantCombine::Pair => {
                    out[2 * j][v] = d1;
                    out[2 * j + 1][v] = d2;
                }
            }
        }
    }
    Ok((out, means))
}
