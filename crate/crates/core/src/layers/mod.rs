//! Network layers: the diffusion layer, the tangent MLP, the invariant layer,
//! pooling and the classifier head.

mod diffusion;
mod head;
mod invariant;
mod tmlp;

pub use diffusion::{
    activate, activate_in_place, diffusion_layer, l_step_map, step_map, DiffusionLayerParams,
};
pub(crate) use diffusion::{channel_l_step, diffuse_channels};
pub use head::{cross_entropy, head, head_backward, log_softmax, pool, HeadGradient, HeadParams};
pub(crate) use invariant::invariant_layer_warm;
pub use invariant::{
    invariant_layer, softmax, InvariantCombine, InvariantLayerParams, InvariantMode,
};
pub(crate) use tmlp::tmlp_with_reference;
pub use tmlp::{
    tangent_layer, tmlp, tmlp_layer, tmlp_layer_with_reference, TmlpLayerParams, TmlpNonlinearity,
};

use serde::{Deserialize, Serialize};

/// Scalar nonlinearity used by the tangent MLP and the head.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    LeakyRelu { slope: f64 },
}

impl Default for Activation {
    fn default() -> Self {
        Activation::LeakyRelu { slope: 0.01 }
    }
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu { slope } => {
                if x >= 0.0 {
                    x
                } else {
                    slope * x
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu { slope } => {
                if x >= 0.0 {
                    1.0
                } else {
                    slope
                }
            }
        }
    }
}
