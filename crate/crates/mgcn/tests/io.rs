use mgcn::io::{
    export_trajectory, graph_from_json, graph_to_json, read_checkpoint, read_graph, read_history,
    read_manifest, read_trajectory, write_checkpoint, write_graph, write_history, write_manifest,
    Checkpoint, Manifest, ManifestEntry, MANIFEST_VERSION,
};
use mgcn::mgcn_core::dynamics::{integrate, Trajectory};
use mgcn::mgcn_core::graph::Edge;
use mgcn::mgcn_core::train::{stratified_split, EpochRecord, ModelDescriptor, ModelParams};
use mgcn::mgcn_core::{FeatureGraph, FeatureMap, ManifoldKind};
use mgcn::Error;

fn sphere_graph() -> FeatureGraph {
    // coordinates with long binary expansions to exercise exact decimal round trips
    let s = (1.0f64 / 3.0).sqrt();
    let a = [0.1f64, 0.2, (1.0f64 - 0.05).sqrt()];
    let data = vec![s, s, s, a[0], a[1], a[2], 0.0, 0.0, 1.0];
    let map = FeatureMap::new(ManifoldKind::Sphere(2), data).unwrap();
    let edges = vec![
        Edge {
            from: 0,
            to: 1,
            weight: 1.0 / 7.0,
        },
        Edge {
            from: 1,
            to: 0,
            weight: 0.1 + 0.2,
        },
        Edge {
            from: 1,
            to: 2,
            weight: 2.0f64.sqrt() / 10.0,
        },
        Edge {
            from: 2,
            to: 1,
            weight: 1e-300,
        },
    ];
    FeatureGraph::new(3, edges, vec![map.clone(), map])
        .unwrap()
        .with_label(2)
        .with_covariates(vec![std::f64::consts::PI])
}

#[test]
fn graph_round_trip_is_bitwise() {
    let g = sphere_graph();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    write_graph(&g, &path).unwrap();
    let back = read_graph(&path).unwrap();
    assert_eq!(back.node_count(), g.node_count());
    assert_eq!(back.label, Some(2));
    for (a, b) in back.edges().iter().zip(g.edges()) {
        assert_eq!(
            (a.from, a.to, a.weight.to_bits()),
            (b.from, b.to, b.weight.to_bits())
        );
    }
    for (a, b) in back.channels().iter().zip(g.channels()) {
        let bits = |m: &FeatureMap| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(a), bits(b));
    }
    assert_eq!(back.covariates[0].to_bits(), std::f64::consts::PI.to_bits());
}

#[test]
fn schema_layout() {
    let text = graph_to_json(&sphere_graph()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(
        v["manifold"],
        serde_json::json!({"kind": "sphere", "dim": 2})
    );
    assert_eq!(v["nodes"], 3);
    assert_eq!(v["edges"][0].as_array().unwrap().len(), 3);
    assert_eq!(v["channels"][1][2], serde_json::json!([0.0, 0.0, 1.0]));
}

#[test]
fn missing_weight_names_the_path() {
    let text = r#"{"version":1,"manifold":{"kind":"euclidean","dim":1},"nodes":2,
        "edges":[[0,1,0.5],[1,0]],"channels":[[[0.0],[1.0]]]}"#;
    let err = graph_from_json(text, "g.json").unwrap_err();
    match &err {
        Error::Schema { at, .. } => assert_eq!(at, "$.edges[1]"),
        e => panic!("unexpected error {e}"),
    }
    assert!(err.to_string().contains("$.edges[1]"));
}

#[test]
fn bad_points_name_the_path() {
    let text = r#"{"version":1,"manifold":{"kind":"sphere","dim":2},"nodes":1,"edges":[],"channels":[[[1.0,0.0]]]}"#;
    let err = graph_from_json(text, "g.json").unwrap_err();
    assert!(err.to_string().contains("$.channels[0][0]"), "{err}");
    let text = r#"{"version":1,"manifold":{"kind":"sphere","dim":2},"nodes":1,"edges":[],"channels":[[[2.0,0.0,0.0]]]}"#;
    assert!(graph_from_json(text, "g.json")
        .unwrap_err()
        .to_string()
        .contains("$.channels[0][0]"));
}

#[test]
fn unknown_version_is_rejected() {
    let text = r#"{"version":2,"manifold":{"kind":"euclidean","dim":1},"nodes":1,"edges":[],"channels":[[[0.0]]]}"#;
    let err = graph_from_json(text, "g.json").unwrap_err();
    assert!(
        matches!(
            err,
            Error::UnsupportedVersion {
                found: 2,
                supported: 1,
                ..
            }
        ),
        "{err}"
    );
    assert!(err.to_string().contains("unsupported"));
}

#[test]
fn trajectory_export() {
    let dir = tempfile::tempdir().unwrap();
    let empty = Trajectory {
        times: vec![],
        snapshots: vec![],
        dt: 0.1,
        graph_id: None,
    };
    let path = dir.path().join("empty.jsonl");
    export_trajectory(&empty, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"");

    let g = sphere_graph();
    let one = integrate(&g, 0, 0.0, 0.1).unwrap();
    assert_eq!(one.len(), 1);
    let path = dir.path().join("one.jsonl");
    export_trajectory(&one, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);

    let traj = integrate(&g, 0, 0.3, 0.1).unwrap();
    let path = dir.path().join("traj.jsonl");
    export_trajectory(&traj, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let first = text.lines().next().unwrap();
    // stable field order
    assert!(
        first.starts_with(r#"{"step":0,"t":0.0,"manifold":{"kind":"sphere","dim":2},"points":"#),
        "{first}"
    );
    let back = read_trajectory(&path).unwrap();
    assert_eq!(back.len(), traj.len());
    for (s, t) in back.iter().zip(&traj.times) {
        assert_eq!(s.t.to_bits(), t.to_bits());
    }
}

#[test]
fn checkpoint_manifest_and_history_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let params = ModelParams::init(
        ModelDescriptor::synthetic(ManifoldKind::Lorentz(5), 3, 1),
        3,
    )
    .unwrap();
    let mut ckpt = Checkpoint::new(&params, 3, 7, 0.625);
    ckpt.split = Some(stratified_split(&[0, 1, 2, 0, 1, 2], [4, 1, 1], 1).unwrap());
    let path = dir.path().join("model.json");
    write_checkpoint(&ckpt, &path).unwrap();
    let back = read_checkpoint(&path).unwrap();
    assert_eq!(back, ckpt);
    assert_eq!(back.model().unwrap(), params);

    let manifest = Manifest {
        version: MANIFEST_VERSION,
        dataset: "synthetic".into(),
        seed: 1,
        classes: 3,
        settings: serde_json::json!({"nodes": 30}),
        samples: vec![ManifestEntry {
            file: "graph_0000.json".into(),
            label: 0,
            seed: 99,
            description: None,
        }],
    };
    let path = dir.path().join("manifest.json");
    write_manifest(&manifest, &path).unwrap();
    assert_eq!(read_manifest(&path).unwrap(), manifest);

    let history = vec![
        EpochRecord {
            epoch: 1,
            train_loss: 1.0 / 3.0,
            validation_f1: 0.5,
            validation_accuracy: 0.25,
        },
        EpochRecord {
            epoch: 2,
            train_loss: 0.1,
            validation_f1: 0.75,
            validation_accuracy: 0.5,
        },
    ];
    let path = dir.path().join("history.csv");
    write_history(&history, &path).unwrap();
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("epoch,train_loss,validation_f1,validation_accuracy\n"));
    assert_eq!(read_history(&path).unwrap(), history);
}

#[test]
fn truncated_checkpoint_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let params = ModelParams::init(
        ModelDescriptor::synthetic(ManifoldKind::Lorentz(5), 3, 1),
        3,
    )
    .unwrap();
    let mut ckpt = Checkpoint::new(&params, 3, 7, 0.625);
    ckpt.params.pop();
    let path = dir.path().join("model.json");
    write_checkpoint(&ckpt, &path).unwrap();
    assert!(read_checkpoint(&path).is_err());
}
