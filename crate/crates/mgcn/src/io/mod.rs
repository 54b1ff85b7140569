//! On-disk formats: graph JSON, trajectories as JSON lines, checkpoints,
//! dataset manifests, training histories (CSV) and OBJ meshes.

mod checkpoint;
mod graph;
mod history;
mod manifest;
mod trajectory;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use graph::{graph_from_json, graph_to_json, read_graph, write_graph, GRAPH_VERSION};
pub use history::{read_history, write_history};
pub use manifest::{read_manifest, write_manifest, Manifest, ManifestEntry, MANIFEST_VERSION};
pub use trajectory::{export_trajectory, read_trajectory, trajectory_to_jsonl, Snapshot};

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};
use mgcn_core::datagen::{parse_obj, write_obj, TriangleMesh};

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Deserializes `text`, reporting failures with the JSON path of the bad value.
pub(crate) fn from_json<T: DeserializeOwned>(text: &str, file: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        file: file.to_string(),
        at: json_path(&e.path().to_string()),
        message: e.into_inner().to_string(),
    })
}

fn json_path(p: &str) -> String {
    match p {
        "." | "" => "$".to_string(),
        p if p.starts_with('[') => format!("${p}"),
        p => format!("$.{p}"),
    }
}

/// Reads the `version` field of a JSON document and rejects unknown versions.
pub(crate) fn check_version(
    text: &str,
    file: &str,
    what: &'static str,
    supported: u64,
) -> Result<()> {
    #[derive(serde::Deserialize)]
    struct Header {
        version: u64,
    }
    let header: Header = from_json(text, file)?;
    if header.version != supported {
        return Err(Error::UnsupportedVersion {
            file: file.to_string(),
            what,
            found: header.version,
            supported,
        });
    }
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<TriangleMesh> {
    Ok(parse_obj(&read_text(path)?)?)
}

pub fn write_mesh(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    write_atomic(path, write_obj(mesh).as_bytes())
}

pub(crate) fn to_json_pretty<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory JSON serialization");
    out.push(b'\n');
    out
}
