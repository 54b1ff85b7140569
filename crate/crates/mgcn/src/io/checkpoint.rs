use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_version, from_json, read_text, to_json_pretty, write_atomic};
use crate::error::Result;
use mgcn_core::train::{ModelDescriptor, ModelParams, Split};

pub const CHECKPOINT_VERSION: u64 = 1;

/// A trained model: architecture, flat parameters and how they were obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u64,
    pub descriptor: ModelDescriptor,
    pub params: Vec<f64>,
    pub seed: u64,
    pub epoch: usize,
    pub validation_score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl Checkpoint {
    pub fn new(params: &ModelParams, seed: u64, epoch: usize, validation_score: f64) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            descriptor: params.descriptor.clone(),
            params: params.flatten(),
            seed,
            epoch,
            validation_score,
            split: None,
        }
    }

    pub fn model(&self) -> Result<ModelParams> {
        Ok(ModelParams::unflatten(
            self.descriptor.clone(),
            self.params.clone(),
        )?)
    }
}

pub fn write_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<()> {
    write_atomic(path, &to_json_pretty(ckpt))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = read_text(path)?;
    let file = path.display().to_string();
    check_version(&text, &file, "checkpoint", CHECKPOINT_VERSION)?;
    let ckpt: Checkpoint = from_json(&text, &file)?;
    ckpt.model()?;
    Ok(ckpt)
}
