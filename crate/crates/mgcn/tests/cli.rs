use std::path::Path;
use std::process::{Command, Output};

fn mgcn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgcn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = mgcn(&["verify", "--seed", "1", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
}

#[test]
fn stochastic_commands_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = mgcn(&["gen-data", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn verify_suite_passes_and_reports_json() {
    let out = mgcn(&["verify", "--suite", "equivariance", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"][0]["id"], 2);
    assert_eq!(report["criteria"][0]["suite"], "equivariance");
    assert!(stderr(&out).contains("criterion 2 (equivariance): PASS"));
}

#[test]
fn verify_rejects_unknown_suites() {
    let out = mgcn(&["verify", "--suite", "nonsense", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn diffusing_across_antipodal_points_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("antipodal.json");
    write(
        &graph,
        r#"{"version":1,"manifold":{"kind":"sphere","dim":2},"nodes":3,
            "edges":[[0,1,0.5],[1,0,0.5],[1,2,0.5],[2,1,0.5]],
            "channels":[[[0.0,0.0,1.0],[1.0,0.0,0.0],[0.0,0.0,-1.0]]]}"#,
    );
    // nodes 1 and 2 are fine; add the antipodal edge 0 -> 2
    let text = std::fs::read_to_string(&graph)
        .unwrap()
        .replace("[2,1,0.5]]", "[2,1,0.5],[0,2,0.25]]");
    write(&graph, &text);
    let out_path = dir.path().join("traj.jsonl");
    let out = mgcn(&[
        "diffuse",
        "--graph",
        graph.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("(0 -> 2)"), "{}", stderr(&out));
    assert!(!out_path.exists());
}

#[test]
fn diffuse_writes_one_line_per_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    write(
        &graph,
        r#"{"version":1,"manifold":{"kind":"euclidean","dim":1},"nodes":2,
            "edges":[[0,1,1.0],[1,0,1.0]],"channels":[[[0.0],[1.0]]]}"#,
    );
    let out_path = dir.path().join("traj.jsonl");
    let out = mgcn(&[
        "diffuse",
        "--graph",
        graph.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--t-end",
        "0.5",
        "--dt",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 6);
    // x' = -(x - y) on both nodes: the midpoint stays at 1/2
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    let (a, b) = (
        last["points"][0][0].as_f64().unwrap(),
        last["points"][1][0].as_f64().unwrap(),
    );
    assert!((a + b - 1.0).abs() < 1e-12);
}

#[test]
fn count_params_reports_the_synthetic_total() {
    let out = mgcn(&["count-params"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let total = text.lines().last().unwrap();
    assert!(
        total.starts_with("total") && total.trim_end().ends_with("429"),
        "{text}"
    );
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    write(&config, "seed = 7\nsuite = [\"params\"]\n");
    let out = mgcn(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 7);
    let out = mgcn(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 9);
}

#[test]
fn generate_train_evaluate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = |name: &str| {
        let out_dir = d.join(name);
        let out = mgcn(&[
            "gen-data",
            "--seed",
            "5",
            "--per-class",
            "6",
            "--nodes",
            "8",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        out_dir
    };
    let (a, b) = (gen("a"), gen("b"));
    for f in ["manifest.json", "graph_0000.json", "graph_0008.json"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let manifest = a.join("manifest.json");
    let train = |name: &str| {
        let ckpt = d.join(name);
        let history = d.join(format!("{name}.csv"));
        let out = mgcn(&[
            "train",
            "--data",
            manifest.to_str().unwrap(),
            "--out",
            ckpt.to_str().unwrap(),
            "--history",
            history.to_str().unwrap(),
            "--seed",
            "2",
            "--epochs",
            "2",
            "--quiet",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        (
            std::fs::read(&ckpt).unwrap(),
            std::fs::read_to_string(&history).unwrap(),
        )
    };
    let (c1, h1) = train("m1.json");
    let (c2, _) = train("m2.json");
    assert_eq!(c1, c2);
    assert_eq!(h1.lines().count(), 3);

    let out = mgcn(&[
        "eval",
        "--checkpoint",
        d.join("m1.json").to_str().unwrap(),
        "--data",
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let eval: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eval["split"], "test");
    assert_eq!(eval["samples"], 3);
    let f1 = eval["macro_f1"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f1));
}

#[test]
fn training_on_missing_data_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = mgcn(&[
        "train",
        "--data",
        dir.path().join("missing.json").to_str().unwrap(),
        "--out",
        dir.path().join("m.json").to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing.json"));
}
