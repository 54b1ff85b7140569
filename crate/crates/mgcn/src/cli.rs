//! The `mgcn` command line: dataset generation, training, evaluation,
//! diffusion export, verification and parameter counting.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{
    export_trajectory, read_checkpoint, read_graph, read_manifest, read_text, to_json_pretty,
    write_atomic, write_checkpoint, write_graph, write_history, write_manifest, Checkpoint,
    Manifest, ManifestEntry, MANIFEST_VERSION,
};
use crate::verify::{run_all, suite_id, Scale, VerifyOptions, SUITES};
use mgcn_core::datagen::{
    derive_seed, mesh_dataset, synthetic_dataset, Embedding, Family, MeshClass, NormalWeighting,
};
use mgcn_core::dynamics::integrate_every;
use mgcn_core::train::{
    evaluate, stratified_split, train_with_callback, ModelDescriptor, ModelParams, Selection,
    TrainConfig,
};
use mgcn_core::{FeatureGraph, ManifoldKind};

#[derive(Debug, Parser)]
#[command(
    name = "mgcn",
    version,
    about = "Graph networks on Riemannian manifolds",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled dataset of graph files plus a manifest.
    GenData(GenDataArgs),
    /// Train a model on a dataset and write a checkpoint.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset.
    Eval(EvalArgs),
    /// Integrate the graph diffusion equation and export the trajectory as JSON lines.
    Diffuse(DiffuseArgs),
    /// Run the verification suites and emit a JSON report.
    Verify(VerifyArgs),
    /// Print the parameter count of an architecture with a per-layer breakdown.
    CountParams(CountArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Dataset {
    Synthetic,
    Mesh,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EmbeddingArg {
    OnehotLorentz,
    OnehotSpd,
    DegreeLorentz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightingArg {
    Area,
    Uniform,
    Max,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SelectionArg {
    LastBest,
    FirstBest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SplitArg {
    Train,
    Validation,
    Test,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Synthetic,
    Mesh,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, value_enum, default_value = "synthetic")]
    pub dataset: Dataset,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Graphs per class.
    #[arg(long, default_value_t = 30)]
    pub per_class: usize,
    /// Nodes per synthetic graph.
    #[arg(long, default_value_t = 30)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value = "onehot-lorentz")]
    pub embedding: EmbeddingArg,
    /// Matrix size for the SPD embedding.
    #[arg(long, default_value_t = 8)]
    pub spd_size: usize,
    /// Target dimension for the degree embedding.
    #[arg(long, default_value_t = 8)]
    pub degree_dim: usize,
    /// Icosphere subdivisions for meshes.
    #[arg(long, default_value_t = 2)]
    pub subdivisions: usize,
    #[arg(long, value_enum, default_value = "area")]
    pub weighting: WeightingArg,
}

#[derive(Debug, Args)]
pub struct ArchArgs {
    /// Diffusion steps per layer.
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    /// (diffusion, tMLP) pairs for the mesh architecture.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Channel width of the mesh architecture.
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    /// Hidden units of the mesh head.
    #[arg(long, default_value_t = 8)]
    pub head_hidden: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset manifest written by `gen-data`.
    #[arg(long)]
    pub data: PathBuf,
    /// Checkpoint to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 60)]
    pub epochs: usize,
    #[arg(long, default_value_t = 3)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Tie-breaking among equally scored epochs; defaults to last-best for
    /// synthetic data and first-best for meshes.
    #[arg(long, value_enum)]
    pub selection: Option<SelectionArg>,
    /// Keep a running average of the parameters at this rate and select from it.
    #[arg(long)]
    pub average_rate: Option<f64>,
    /// Per-epoch CSV history.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[command(flatten)]
    pub arch: ArchArgs,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Which part of the stored split to evaluate.
    #[arg(long, value_enum, default_value = "test")]
    pub split: SplitArg,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiffuseArgs {
    /// Graph file (schema v1).
    #[arg(long)]
    pub graph: PathBuf,
    /// Trajectory output (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub channel: usize,
    /// Record every n-th step.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name or criterion number; repeatable. All suites when omitted.
    #[arg(long)]
    pub suite: Vec<String>,
    #[arg(long)]
    pub seed: u64,
    /// Reduced case counts.
    #[arg(long)]
    pub quick: bool,
    /// JSON report path; printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, value_enum, default_value = "synthetic")]
    pub preset: Preset,
    /// Manifold as `kind:dim`, e.g. `lorentz:30`.
    #[arg(long, default_value = "lorentz:30", value_parser = parse_kind)]
    pub manifold: ManifoldKind,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    /// Architecture descriptor (JSON); overrides the preset.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    #[command(flatten)]
    pub arch: ArchArgs,
}

fn parse_kind(s: &str) -> std::result::Result<ManifoldKind, String> {
    let (kind, dim) = s.split_once(':').ok_or("expected kind:dim")?;
    let dim: usize = dim.parse().map_err(|_| format!("bad dimension {dim:?}"))?;
    let k = match kind {
        "euclidean" => ManifoldKind::Euclidean(dim),
        "sphere" => ManifoldKind::Sphere(dim),
        "lorentz" => ManifoldKind::Lorentz(dim),
        "spd" => ManifoldKind::Spd(dim),
        _ => return Err(format!("unknown manifold {kind:?}")),
    };
    k.validate().map_err(|e| e.to_string())?;
    Ok(k)
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Replaces `--config FILE` by the flags of the TOML file, placed right after
/// the subcommand so that flags given on the command line take precedence.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .map(PathBuf::from)
        .ok_or_else(|| Error::Invalid("--config needs a file".into()))?;
    let text = read_text(&path)?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Schema {
        file: path.display().to_string(),
        at: "$".into(),
        message: e.message().to_string(),
    })?;
    let mut flags = Vec::new();
    for (key, value) in &table {
        let flag = format!("--{}", key.replace('_', "-"));
        let values = match value {
            toml::Value::Array(items) => items.clone(),
            v => vec![v.clone()],
        };
        for v in values {
            match v {
                toml::Value::Boolean(true) => flags.push(OsString::from(&flag)),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => flags.extend([OsString::from(&flag), s.into()]),
                toml::Value::Integer(i) => {
                    flags.extend([OsString::from(&flag), i.to_string().into()])
                }
                toml::Value::Float(f) => {
                    flags.extend([OsString::from(&flag), f.to_string().into()])
                }
                other => {
                    return Err(Error::Invalid(format!(
                        "{}: unsupported value for {key}: {other}",
                        path.display()
                    )))
                }
            }
        }
    }
    let mut rest = argv;
    rest.drain(pos..pos + 2);
    // subcommand is the first argument after the program name
    let at = 2.min(rest.len());
    rest.splice(at..at, flags);
    Ok(rest)
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::GenData(a) => gen_data(&a).map(|_| 0),
        Command::Train(a) => train_cmd(&a).map(|_| 0),
        Command::Eval(a) => eval_cmd(&a).map(|_| 0),
        Command::Diffuse(a) => diffuse(&a).map(|_| 0),
        Command::Verify(a) => verify(&a),
        Command::CountParams(a) => count_params(&a).map(|_| 0),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn gen_data(a: &GenDataArgs) -> Result<()> {
    if a.per_class == 0 {
        return Err(Error::Invalid("--per-class must be positive".into()));
    }
    create_dir(&a.out)?;
    let (graphs, classes, settings, describe): (
        Vec<FeatureGraph>,
        usize,
        serde_json::Value,
        Box<dyn Fn(usize) -> (u64, String)>,
    ) = match a.dataset {
        Dataset::Synthetic => {
            let embedding = match a.embedding {
                EmbeddingArg::OnehotLorentz => Embedding::OneHotLorentz,
                EmbeddingArg::OnehotSpd => Embedding::OneHotSpd { size: a.spd_size },
                EmbeddingArg::DegreeLorentz => Embedding::DegreeLorentz {
                    dim: a.degree_dim,
                    seed: derive_seed(a.seed, u64::MAX),
                },
            };
            let graphs = synthetic_dataset(a.per_class, a.nodes, &embedding, a.seed)?;
            let settings = serde_json::json!({ "per_class": a.per_class, "nodes": a.nodes, "embedding": embedding });
            let seed = a.seed;
            let describe = move |i: usize| {
                (
                    derive_seed(seed, i as u64),
                    format!("{:?}", Family::ALL[i % 3]),
                )
            };
            (graphs, 3, settings, Box::new(describe))
        }
        Dataset::Mesh => {
            let weighting = match a.weighting {
                WeightingArg::Area => NormalWeighting::Area,
                WeightingArg::Uniform => NormalWeighting::Uniform,
                WeightingArg::Max => NormalWeighting::Max,
            };
            let graphs = mesh_dataset(a.per_class, a.subdivisions, weighting, a.seed)?;
            let settings = serde_json::json!({ "per_class": a.per_class, "subdivisions": a.subdivisions, "weighting": weighting });
            let seed = a.seed;
            let describe = move |i: usize| {
                let class = if i % 2 == 0 {
                    MeshClass::Smooth
                } else {
                    MeshClass::Bumpy
                };
                (derive_seed(seed, i as u64), format!("{class:?}"))
            };
            (graphs, 2, settings, Box::new(describe))
        }
    };
    let mut samples = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let file = format!("graph_{i:04}.json");
        write_graph(g, &a.out.join(&file))?;
        let (seed, description) = describe(i);
        samples.push(ManifestEntry {
            file,
            label: g.label.unwrap_or_default(),
            seed,
            description: Some(description),
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        dataset: match a.dataset {
            Dataset::Synthetic => "synthetic",
            Dataset::Mesh => "mesh",
        }
        .into(),
        seed: a.seed,
        classes,
        settings,
        samples,
    };
    write_manifest(&manifest, &a.out.join("manifest.json"))?;
    eprintln!("wrote {} graphs to {}", graphs.len(), a.out.display());
    Ok(())
}

fn load_dataset(path: &Path) -> Result<(Manifest, Vec<FeatureGraph>)> {
    let manifest = read_manifest(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut graphs = Vec::with_capacity(manifest.samples.len());
    for entry in &manifest.samples {
        let g = read_graph(&dir.join(&entry.file))?;
        if g.label != Some(entry.label) {
            return Err(Error::Invalid(format!(
                "{}: label disagrees with the manifest",
                entry.file
            )));
        }
        graphs.push(g);
    }
    if graphs.is_empty() {
        return Err(Error::Invalid(format!("{}: no samples", path.display())));
    }
    Ok((manifest, graphs))
}

fn descriptor_for(manifest: &Manifest, kind: ManifoldKind, arch: &ArchArgs) -> ModelDescriptor {
    if manifest.dataset == "mesh" {
        ModelDescriptor::mesh(arch.depth, arch.width, arch.steps, arch.head_hidden)
    } else {
        ModelDescriptor::synthetic(kind, manifest.classes, arch.steps)
    }
}

fn train_cmd(a: &TrainArgs) -> Result<()> {
    let (manifest, graphs) = load_dataset(&a.data)?;
    let kind = graphs[0]
        .kind()
        .ok_or_else(|| Error::Invalid("graph without channels".into()))?;
    let descriptor = descriptor_for(&manifest, kind, &a.arch);
    descriptor.validate()?;
    let labels: Vec<usize> = graphs.iter().filter_map(|g| g.label).collect();
    let split = stratified_split(&labels, [4, 1, 1], a.seed)?;
    let selection = match a.selection {
        Some(SelectionArg::LastBest) => Selection::LastBest,
        Some(SelectionArg::FirstBest) => Selection::FirstBest,
        None if manifest.dataset == "mesh" => Selection::FirstBest,
        None => Selection::LastBest,
    };
    let mut cfg = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch_size,
        seed: a.seed,
        selection,
        average_rate: a.average_rate,
        ..TrainConfig::default()
    };
    cfg.adam.lr = a.lr;
    let params = ModelParams::init(descriptor, a.seed)?;
    let quiet = a.quiet;
    let outcome = train_with_callback(params, &graphs, &split, &cfg, |r| {
        if !quiet {
            eprintln!(
                "epoch {:3}  train loss {:.4}  val macro-F1 {:.3}  val acc {:.3}",
                r.epoch, r.train_loss, r.validation_f1, r.validation_accuracy
            );
        }
    })?;
    let mut ckpt = Checkpoint::new(
        &outcome.best,
        a.seed,
        outcome.best_epoch,
        outcome.best_score,
    );
    ckpt.split = Some(split);
    write_checkpoint(&ckpt, &a.out)?;
    if let Some(h) = &a.history {
        write_history(&outcome.history, h)?;
    }
    eprintln!(
        "selected epoch {} (validation macro-F1 {:.3})",
        outcome.best_epoch, outcome.best_score
    );
    Ok(())
}

#[derive(Serialize)]
struct EvalReport<'a> {
    split: &'a str,
    samples: usize,
    #[serde(flatten)]
    evaluation: mgcn_core::train::Evaluation,
}

fn eval_cmd(a: &EvalArgs) -> Result<()> {
    let ckpt = read_checkpoint(&a.checkpoint)?;
    let params = ckpt.model()?;
    let (_, graphs) = load_dataset(&a.data)?;
    let all: Vec<usize> = (0..graphs.len()).collect();
    let (name, indices) = match (a.split, &ckpt.split) {
        (SplitArg::All, _) => ("all", all),
        (s, Some(split)) => match s {
            SplitArg::Train => ("train", split.train.clone()),
            SplitArg::Validation => ("validation", split.validation.clone()),
            _ => ("test", split.test.clone()),
        },
        (_, None) => {
            return Err(Error::Invalid(
                "checkpoint stores no split; use --split all".into(),
            ))
        }
    };
    if let Some(&i) = indices.iter().find(|&&i| i >= graphs.len()) {
        return Err(Error::Invalid(format!(
            "split index {i} outside the dataset of {} graphs",
            graphs.len()
        )));
    }
    let report = EvalReport {
        split: name,
        samples: indices.len(),
        evaluation: evaluate(&params, &graphs, &indices)?,
    };
    let json = to_json_pretty(&report);
    match &a.out {
        Some(p) => write_atomic(p, &json),
        None => {
            print!("{}", String::from_utf8_lossy(&json));
            Ok(())
        }
    }
}

fn diffuse(a: &DiffuseArgs) -> Result<()> {
    if a.every == 0 {
        return Err(Error::Invalid("--every must be positive".into()));
    }
    let g = read_graph(&a.graph)?;
    let mut traj = integrate_every(&g, a.channel, a.t_end, a.dt, a.every)?;
    traj.graph_id = Some(a.graph.display().to_string());
    export_trajectory(&traj, &a.out)?;
    eprintln!("wrote {} snapshots to {}", traj.len(), a.out.display());
    Ok(())
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let ids: Vec<usize> = if a.suite.is_empty() {
        SUITES.iter().map(|(id, _)| *id).collect()
    } else {
        a.suite
            .iter()
            .map(|s| suite_id(s).ok_or_else(|| Error::Invalid(format!("unknown suite {s:?}"))))
            .collect::<Result<_>>()?
    };
    let opts = VerifyOptions {
        seed: a.seed,
        scale: if a.quick { Scale::Quick } else { Scale::Full },
    };
    let report = run_all(&ids, &opts, |r| eprintln!("{}", r.summary()))?;
    let json = to_json_pretty(&report);
    match &a.report {
        Some(p) => write_atomic(p, &json)?,
        None => print!("{}", String::from_utf8_lossy(&json)),
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn count_params(a: &CountArgs) -> Result<()> {
    let d = match (&a.descriptor, a.preset) {
        (Some(p), _) => crate::io::from_json(&read_text(p)?, &p.display().to_string())?,
        (None, Preset::Synthetic) => {
            ModelDescriptor::synthetic(a.manifold, a.classes, a.arch.steps)
        }
        (None, Preset::Mesh) => {
            ModelDescriptor::mesh(a.arch.depth, a.arch.width, a.arch.steps, a.arch.head_hidden)
        }
    };
    let d: ModelDescriptor = d;
    d.validate()?;
    for (name, count) in d.param_breakdown() {
        println!("{name:<40} {count:>8}");
    }
    println!("{:<40} {:>8}", "total", d.count_params());
    Ok(())
}
