use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{from_json, read_text, write_atomic};
use crate::error::Result;
use mgcn_core::dynamics::Trajectory;
use mgcn_core::ManifoldKind;

/// One line of a trajectory export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub manifold: ManifoldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    pub points: Vec<Vec<f64>>,
}

/// JSON lines, one snapshot per line, fields in a fixed order.
pub fn trajectory_to_jsonl(traj: &Trajectory) -> String {
    let mut out = String::new();
    for (step, (t, map)) in traj.times.iter().zip(&traj.snapshots).enumerate() {
        let snap = Snapshot {
            step,
            t: *t,
            manifold: map.kind(),
            graph: traj.graph_id.clone(),
            points: map.points().map(<[f64]>::to_vec).collect(),
        };
        out.push_str(&serde_json::to_string(&snap).expect("finite snapshot"));
        out.push('\n');
    }
    out
}

pub fn export_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    write_atomic(path, trajectory_to_jsonl(traj).as_bytes())
}

pub fn read_trajectory(path: &Path) -> Result<Vec<Snapshot>> {
    let text = read_text(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| from_json(l, &format!("{}:{}", path.display(), i + 1)))
        .collect()
}
