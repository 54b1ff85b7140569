use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::descriptor::{BlockKind, LayerSpec, ModelDescriptor, ParamBlock};
use crate::error::{Error, Result};
use crate::layers::{
    Activation, DiffusionLayerParams, HeadParams, InvariantLayerParams, TmlpLayerParams,
};

/// An architecture together with its flat parameter vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub descriptor: ModelDescriptor,
    values: Vec<f64>,
}

impl ModelParams {
    /// Wraps a flat vector; fails when its length does not match the descriptor.
    pub fn unflatten(descriptor: ModelDescriptor, values: Vec<f64>) -> Result<Self> {
        descriptor.validate()?;
        let expected = descriptor.count_params();
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { descriptor, values })
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.values.clone()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block(&self, name: &str) -> Option<&[f64]> {
        self.descriptor
            .blocks()
            .into_iter()
            .find(|b| b.name == name)
            .map(|b| &self.values[b.range])
    }

    /// Random initialization: diffusion times uniform in `[0.5, 1]`, thresholds
    /// zero, tMLP weights `N(0, 1/c_in)`, invariant logits `N(0, 1)`, head
    /// weights `N(0, 2/fan_in)` and zero biases.
    pub fn init(descriptor: ModelDescriptor, seed: u64) -> Result<Self> {
        descriptor.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = alloc::vec![0.0; descriptor.count_params()];
        let d = descriptor.head_input();
        let h = descriptor.head_hidden;
        for block in descriptor.blocks() {
            let slice = &mut values[block.range.clone()];
            match block.kind {
                BlockKind::DiffusionTime => slice
                    .iter_mut()
                    .for_each(|v| *v = rng.random_range(0.5..1.0)),
                BlockKind::DiffusionThreshold | BlockKind::HeadBias => {}
                BlockKind::TmlpOmega | BlockKind::TmlpXi => {
                    let c_in = tmlp_fan_in(&descriptor, &block);
                    fill_normal(slice, 1.0 / c_in as f64, &mut rng);
                }
                BlockKind::InvariantLogits => fill_normal(slice, 1.0, &mut rng),
                BlockKind::HeadWeight => {
                    let fan_in = if block.name.ends_with("w1") { d } else { h };
                    fill_normal(slice, 2.0 / fan_in as f64, &mut rng);
                }
            }
        }
        Ok(Self { descriptor, values })
    }

    /// Clamps diffusion times and thresholds to be non-negative.
    pub fn project(&mut self) {
        for b in self.descriptor.blocks() {
            if matches!(
                b.kind,
                BlockKind::DiffusionTime | BlockKind::DiffusionThreshold
            ) {
                self.values[b.range]
                    .iter_mut()
                    .for_each(|v| *v = v.max(0.0));
            }
        }
    }

    /// Parameters of block layer `i` when it is a diffusion layer.
    pub fn diffusion(&self, i: usize) -> Option<DiffusionLayerParams> {
        diffusion_from(&self.descriptor, &self.values, i)
    }

    /// The tangent layers of block layer `i` when it is a tMLP.
    pub fn tmlp(&self, i: usize) -> Option<Vec<TmlpLayerParams>> {
        tmlp_from(&self.descriptor, &self.values, i)
    }

    pub fn invariant(&self) -> InvariantLayerParams {
        invariant_from(&self.descriptor, &self.values)
    }

    pub fn head(&self) -> HeadParams {
        head_from(&self.descriptor, &self.values)
    }
}

fn fill_normal(slice: &mut [f64], variance: f64, rng: &mut ChaCha8Rng) {
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite variance");
    slice.iter_mut().for_each(|v| *v = normal.sample(rng));
}

fn tmlp_fan_in(d: &ModelDescriptor, block: &ParamBlock) -> usize {
    if let LayerSpec::Tmlp { widths } = &d.layers[block.stage] {
        let k: usize = block
            .name
            .split('.')
            .nth(1)
            .and_then(|s| s.strip_prefix("tmlp"))
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        widths[k]
    } else {
        1
    }
}

fn stage_blocks(d: &ModelDescriptor, stage: usize) -> impl Iterator<Item = ParamBlock> {
    d.blocks().into_iter().filter(move |b| b.stage == stage)
}

pub(crate) fn diffusion_from(
    d: &ModelDescriptor,
    values: &[f64],
    i: usize,
) -> Option<DiffusionLayerParams> {
    let LayerSpec::Diffusion { steps, .. } = d.layers.get(i)? else {
        return None;
    };
    let mut blocks = stage_blocks(d, i);
    let t = blocks.next()?;
    let a = blocks.next()?;
    Some(DiffusionLayerParams {
        times: values[t.range].to_vec(),
        thresholds: values[a.range].to_vec(),
        steps: *steps,
    })
}

pub(crate) fn tmlp_from(
    d: &ModelDescriptor,
    values: &[f64],
    i: usize,
) -> Option<Vec<TmlpLayerParams>> {
    let LayerSpec::Tmlp { widths } = d.layers.get(i)? else {
        return None;
    };
    let blocks: Vec<ParamBlock> = stage_blocks(d, i).collect();
    let activation = Activation::LeakyRelu {
        slope: d.leaky_slope,
    };
    Some(
        widths
            .windows(2)
            .zip(blocks.chunks(2))
            .map(|(w, b)| TmlpLayerParams {
                c_in: w[0],
                c_out: w[1],
                omega: values[b[0].range.clone()].to_vec(),
                xi: values[b[1].range.clone()].to_vec(),
                activation,
                nonlinearity: d.nonlinearity,
            })
            .collect(),
    )
}

pub(crate) fn invariant_from(d: &ModelDescriptor, values: &[f64]) -> InvariantLayerParams {
    let mut blocks = stage_blocks(d, d.invariant_stage());
    let first = blocks.next().expect("descriptor has invariant blocks");
    let second = blocks.next().expect("descriptor has invariant blocks");
    InvariantLayerParams {
        channels: d.block_channels(),
        mode: d.invariant.mode,
        combine: d.invariant.combine,
        logits_first: values[first.range].to_vec(),
        logits_second: values[second.range].to_vec(),
    }
}

pub(crate) fn head_from(d: &ModelDescriptor, values: &[f64]) -> HeadParams {
    let b: Vec<ParamBlock> = stage_blocks(d, d.head_stage()).collect();
    HeadParams {
        input: d.head_input(),
        hidden: d.head_hidden,
        classes: d.classes,
        w1: values[b[0].range.clone()].to_vec(),
        b1: values[b[1].range.clone()].to_vec(),
        w2: values[b[2].range.clone()].to_vec(),
        b2: values[b[3].range.clone()].to_vec(),
        activation: Activation::LeakyRelu {
            slope: d.leaky_slope,
        },
    }
}
