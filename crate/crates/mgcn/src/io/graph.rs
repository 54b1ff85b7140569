use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_version, from_json, read_text, write_atomic};
use crate::error::{Error, Result};
use mgcn_core::graph::Edge;
use mgcn_core::{FeatureGraph, FeatureMap, ManifoldKind};

pub const GRAPH_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    version: u64,
    manifold: ManifoldKind,
    nodes: usize,
    edges: Vec<(usize, usize, f64)>,
    channels: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    covariates: Vec<f64>,
}

pub fn graph_to_json(g: &FeatureGraph) -> Result<String> {
    let manifold = g.kind().ok_or_else(|| {
        Error::Invalid("cannot serialize a graph without feature channels".into())
    })?;
    let doc = GraphDoc {
        version: GRAPH_VERSION,
        manifold,
        nodes: g.node_count(),
        edges: g.edges().iter().map(|e| (e.from, e.to, e.weight)).collect(),
        channels: g
            .channels()
            .iter()
            .map(|c| c.points().map(<[f64]>::to_vec).collect())
            .collect(),
        label: g.label,
        covariates: g.covariates.clone(),
    };
    serde_json::to_string(&doc)
        .map_err(|e| Error::Invalid(format!("graph is not representable as JSON: {e}")))
}

/// Parses a graph document; `file` names the source in error messages.
pub fn graph_from_json(text: &str, file: &str) -> Result<FeatureGraph> {
    check_version(text, file, "graph schema", GRAPH_VERSION)?;
    let doc: GraphDoc = from_json(text, file)?;
    let schema = |at: String, message: String| Error::Schema {
        file: file.to_string(),
        at,
        message,
    };
    doc.manifold
        .validate()
        .map_err(|e| schema("$.manifold".into(), e.to_string()))?;
    let size = doc.manifold.ambient_dim();
    let mut channels = Vec::with_capacity(doc.channels.len());
    for (c, points) in doc.channels.into_iter().enumerate() {
        if points.len() != doc.nodes {
            return Err(schema(
                format!("$.channels[{c}]"),
                format!("expected {} points, found {}", doc.nodes, points.len()),
            ));
        }
        let mut data = Vec::with_capacity(points.len() * size);
        for (v, p) in points.into_iter().enumerate() {
            if p.len() != size {
                return Err(schema(
                    format!("$.channels[{c}][{v}]"),
                    format!("expected {size} coordinates, found {}", p.len()),
                ));
            }
            doc.manifold
                .check_point(&p)
                .map_err(|e| schema(format!("$.channels[{c}][{v}]"), e.to_string()))?;
            data.extend(p);
        }
        channels.push(
            FeatureMap::new(doc.manifold, data)
                .map_err(|e| schema(format!("$.channels[{c}]"), e.to_string()))?,
        );
    }
    let edges = doc
        .edges
        .into_iter()
        .map(|(from, to, weight)| Edge { from, to, weight })
        .collect();
    let mut g = FeatureGraph::new(doc.nodes, edges, channels)
        .map_err(|e| schema("$.edges".into(), e.to_string()))?;
    g.label = doc.label;
    g.covariates = doc.covariates;
    Ok(g)
}

pub fn read_graph(path: &Path) -> Result<FeatureGraph> {
    graph_from_json(&read_text(path)?, &path.display().to_string())
}

pub fn write_graph(g: &FeatureGraph, path: &Path) -> Result<()> {
    let mut text = graph_to_json(g)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
