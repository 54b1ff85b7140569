use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layers::{
    HeadParams, InvariantCombine, InvariantLayerParams, InvariantMode, TmlpNonlinearity,
};
use crate::ManifoldKind;

/// One layer of the equivariant block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LayerSpec {
    Diffusion {
        channels: usize,
        steps: usize,
    },
    /// A tangent MLP; `widths = [c_in, …, c_out]`, one tangent layer per consecutive pair.
    Tmlp {
        widths: Vec<usize>,
    },
}

impl LayerSpec {
    pub fn in_channels(&self) -> usize {
        match self {
            LayerSpec::Diffusion { channels, .. } => *channels,
            LayerSpec::Tmlp { widths } => widths.first().copied().unwrap_or(0),
        }
    }

    pub fn out_channels(&self) -> usize {
        match self {
            LayerSpec::Diffusion { channels, .. } => *channels,
            LayerSpec::Tmlp { widths } => widths.last().copied().unwrap_or(0),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSpec {
    pub mode: InvariantMode,
    pub combine: InvariantCombine,
}

/// Which epoch wins among ties in the validation score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[default]
    LastBest,
    FirstBest,
}

/// Architecture of a network: equivariant block, invariant layer, pooling, head.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub manifold: ManifoldKind,
    pub layers: Vec<LayerSpec>,
    pub invariant: InvariantSpec,
    pub head_hidden: usize,
    pub classes: usize,
    /// Scalar graph covariates appended to the pooled vector (e.g. mesh volume).
    #[serde(default)]
    pub covariates: usize,
    #[serde(default)]
    pub reference_channel: usize,
    #[serde(default)]
    pub nonlinearity: TmlpNonlinearity,
    #[serde(default = "default_slope")]
    pub leaky_slope: f64,
    /// Divide edge weights by the largest weight sum when it exceeds one.
    #[serde(default = "default_true")]
    pub normalize_weights: bool,
}

fn default_slope() -> f64 {
    0.01
}

fn default_true() -> bool {
    true
}

/// Kind of a named parameter block; the optimizer projects diffusion blocks onto `[0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    DiffusionTime,
    DiffusionThreshold,
    TmlpOmega,
    TmlpXi,
    InvariantLogits,
    HeadWeight,
    HeadBias,
}

/// A named slice of the flat parameter vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamBlock {
    pub name: String,
    pub kind: BlockKind,
    /// Index of the network stage (block layers, then invariant, then head).
    pub stage: usize,
    pub range: Range<usize>,
}

impl ModelDescriptor {
    /// The network used for graph classification with 5 diffusion channels,
    /// one tMLP layer widening to 8, an invariant layer with one shared pair
    /// of weighted means, and a head with 16 hidden units (429 parameters for
    /// three classes).
    pub fn synthetic(manifold: ManifoldKind, classes: usize, steps: usize) -> Self {
        Self {
            manifold,
            layers: vec![
                LayerSpec::Diffusion { channels: 5, steps },
                LayerSpec::Tmlp { widths: vec![5, 8] },
            ],
            invariant: InvariantSpec {
                mode: InvariantMode::Shared,
                combine: InvariantCombine::Difference,
            },
            head_hidden: 16,
            classes,
            covariates: 0,
            reference_channel: 0,
            nonlinearity: TmlpNonlinearity::SignedCoefficient,
            leaky_slope: 0.01,
            normalize_weights: true,
        }
    }

    /// `depth` pairs of (diffusion, one-layer tMLP) of constant `width` on the
    /// sphere, per-channel invariant layer, and the mesh volume as covariate.
    pub fn mesh(depth: usize, width: usize, steps: usize, head_hidden: usize) -> Self {
        let mut layers = Vec::with_capacity(2 * depth);
        for _ in 0..depth {
            layers.push(LayerSpec::Diffusion {
                channels: width,
                steps,
            });
            layers.push(LayerSpec::Tmlp {
                widths: vec![width, width],
            });
        }
        Self {
            manifold: ManifoldKind::Sphere(2),
            layers,
            invariant: InvariantSpec::default(),
            head_hidden,
            classes: 2,
            covariates: 1,
            reference_channel: 0,
            nonlinearity: TmlpNonlinearity::SignedCoefficient,
            leaky_slope: 0.01,
            normalize_weights: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.manifold.validate()?;
        if self.layers.is_empty() {
            return Err(Error::InvalidParams(
                "model needs at least one layer".into(),
            ));
        }
        if self.classes < 2 || self.head_hidden == 0 {
            return Err(Error::InvalidParams(
                "model needs >= 2 classes and a non-empty hidden layer".into(),
            ));
        }
        let mut width = self.layers[0].in_channels();
        for (i, layer) in self.layers.iter().enumerate() {
            match layer {
                LayerSpec::Diffusion { channels, steps } => {
                    if *channels == 0 || *steps == 0 {
                        return Err(Error::InvalidParams(format!(
                            "layer {i}: diffusion needs channels, steps >= 1"
                        )));
                    }
                }
                LayerSpec::Tmlp { widths } => {
                    if widths.len() < 2 || widths.contains(&0) {
                        return Err(Error::InvalidParams(format!(
                            "layer {i}: tMLP needs at least two positive widths"
                        )));
                    }
                    if self.reference_channel >= widths[0] {
                        return Err(Error::InvalidParams(format!(
                            "layer {i}: reference channel {} out of range",
                            self.reference_channel
                        )));
                    }
                }
            }
            if layer.in_channels() != width {
                return Err(Error::InvalidParams(format!(
                    "layer {i} expects {} channels but receives {width}",
                    layer.in_channels()
                )));
            }
            width = layer.out_channels();
        }
        Ok(())
    }

    pub fn input_channels(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_channels())
    }

    pub fn block_channels(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_channels())
    }

    pub fn head_input(&self) -> usize {
        2 * self.invariant.combine.width(self.block_channels()) + self.covariates
    }

    /// Stage index of the invariant layer; the head follows it.
    pub fn invariant_stage(&self) -> usize {
        self.layers.len()
    }

    pub fn head_stage(&self) -> usize {
        self.layers.len() + 1
    }

    /// Named parameter blocks in flat order.
    pub fn blocks(&self) -> Vec<ParamBlock> {
        let mut out = Vec::new();
        let mut offset = 0;
        let mut push = |name: String, kind: BlockKind, stage: usize, len: usize| {
            out.push(ParamBlock {
                name,
                kind,
                stage,
                range: offset..offset + len,
            });
            offset += len;
        };
        for (i, layer) in self.layers.iter().enumerate() {
            match layer {
                LayerSpec::Diffusion { channels, .. } => {
                    push(
                        format!("layer{i}.diffusion.t"),
                        BlockKind::DiffusionTime,
                        i,
                        *channels,
                    );
                    push(
                        format!("layer{i}.diffusion.alpha"),
                        BlockKind::DiffusionThreshold,
                        i,
                        *channels,
                    );
                }
                LayerSpec::Tmlp { widths } => {
                    for (k, w) in widths.windows(2).enumerate() {
                        push(
                            format!("layer{i}.tmlp{k}.omega"),
                            BlockKind::TmlpOmega,
                            i,
                            w[0] * w[1],
                        );
                        push(
                            format!("layer{i}.tmlp{k}.xi"),
                            BlockKind::TmlpXi,
                            i,
                            w[0] * w[1],
                        );
                    }
                }
            }
        }
        let c = self.block_channels();
        let logits = InvariantLayerParams::logit_count(c, self.invariant.mode);
        let inv = self.invariant_stage();
        push(
            "invariant.first".into(),
            BlockKind::InvariantLogits,
            inv,
            logits,
        );
        push(
            "invariant.second".into(),
            BlockKind::InvariantLogits,
            inv,
            logits,
        );
        let (d, h, k) = (self.head_input(), self.head_hidden, self.classes);
        let head = self.head_stage();
        push("head.w1".into(), BlockKind::HeadWeight, head, h * d);
        push("head.b1".into(), BlockKind::HeadBias, head, h);
        push("head.w2".into(), BlockKind::HeadWeight, head, k * h);
        push("head.b2".into(), BlockKind::HeadBias, head, k);
        out
    }

    /// Total number of learnable scalars.
    pub fn count_params(&self) -> usize {
        self.blocks().last().map_or(0, |b| b.range.end)
    }

    /// Parameter count per component: each block layer, the invariant layer, the head.
    pub fn param_breakdown(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let name = match layer {
                LayerSpec::Diffusion { channels, steps } => {
                    format!("layer{i} diffusion (c={channels}, steps={steps})")
                }
                LayerSpec::Tmlp { widths } => format!("layer{i} tmlp {widths:?}"),
            };
            out.push((name, 0));
        }
        out.push((
            format!(
                "invariant ({:?}, {:?})",
                self.invariant.mode, self.invariant.combine
            ),
            0,
        ));
        out.push((
            format!(
                "head {}→{}→{}",
                self.head_input(),
                self.head_hidden,
                self.classes
            ),
            0,
        ));
        for b in self.blocks() {
            out[b.stage].1 += b.range.len();
        }
        debug_assert_eq!(
            HeadParams::param_count(self.head_input(), self.head_hidden, self.classes),
            out.last().map_or(0, |o| o.1)
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_layer_formulas() {
        let mut d = ModelDescriptor::synthetic(ManifoldKind::Lorentz(4), 3, 1);
        d.layers = vec![LayerSpec::Diffusion {
            channels: 5,
            steps: 1,
        }];
        d.validate().unwrap();
        let b = d.param_breakdown();
        assert_eq!(b[0].1, 10);

        let d = ModelDescriptor::synthetic(ManifoldKind::Lorentz(4), 3, 1);
        let b = d.param_breakdown();
        assert_eq!(b[1].1, 2 * 5 * 8);
        // invariant: two shared logit vectors of length 8; head 16 → 16 → 3
        assert_eq!(b[2].1, 16);
        assert_eq!(b[3].1, 16 * 16 + 16 + 3 * 16 + 3);
        assert_eq!(d.count_params(), 429);
        assert_eq!(b.iter().map(|x| x.1).sum::<usize>(), 429);

        let mut per_channel = d.clone();
        per_channel.invariant.mode = InvariantMode::PerChannel;
        assert_eq!(per_channel.count_params(), 429 - 16 + 2 * 64);
    }

    #[test]
    fn blocks_tile_the_vector() {
        let d = ModelDescriptor::mesh(2, 4, 1, 8);
        d.validate().unwrap();
        let blocks = d.blocks();
        let mut expected = 0;
        for b in &blocks {
            assert_eq!(b.range.start, expected);
            expected = b.range.end;
        }
        assert_eq!(expected, d.count_params());
        assert_eq!(d.head_input(), 2 * 4 + 1);
    }

    #[test]
    fn validation() {
        let mut d = ModelDescriptor::synthetic(ManifoldKind::Lorentz(4), 3, 1);
        d.layers.push(LayerSpec::Tmlp { widths: vec![5, 2] });
        assert!(d.validate().is_err());
        let mut d = ModelDescriptor::synthetic(ManifoldKind::Lorentz(4), 3, 1);
        d.reference_channel = 5;
        assert!(d.validate().is_err());
        let mut d = ModelDescriptor::synthetic(ManifoldKind::Lorentz(4), 3, 0);
        assert!(d.validate().is_err());
        d.layers[0] = LayerSpec::Diffusion {
            channels: 5,
            steps: 2,
        };
        d.validate().unwrap();
    }
}
