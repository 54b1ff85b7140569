use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_version, from_json, read_text, to_json_pretty, write_atomic};
use crate::error::Result;

pub const MANIFEST_VERSION: u64 = 1;

/// Index of a generated dataset: one entry per graph file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u64,
    /// `synthetic` or `mesh`.
    pub dataset: String,
    pub seed: u64,
    pub classes: usize,
    /// Generator settings, recorded for provenance.
    pub settings: serde_json::Value,
    pub samples: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the manifest's directory.
    pub file: String,
    pub label: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

pub fn write_manifest(m: &Manifest, path: &Path) -> Result<()> {
    write_atomic(path, &to_json_pretty(m))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = read_text(path)?;
    let file = path.display().to_string();
    check_version(&text, &file, "manifest", MANIFEST_VERSION)?;
    from_json(&text, &file)
}
