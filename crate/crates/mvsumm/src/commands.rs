//! Command-line interface.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvsumm_core::evaluator::evaluate;
use mvsumm_core::segmentation::{pool_shot_features, segment_shots, SegmentConfig};
use mvsumm_core::synthetic::{generate_synthetic, SyntheticConfig};
use mvsumm_core::{
    Analysis, GraphConfig, LaplacianKind, MultiViewDataset, PipelineConfig, ScoringMode, ShotRecord, SolverConfig,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Parser)]
#[command(name = "mvsumm", version, about = "Multi-view shot summarization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a dataset once and write summaries for every requested length.
    Summarize(SummarizeArgs),
    /// Write a planted-prototype dataset and its ground truth.
    Synth(SynthArgs),
    /// Score a summary file against ground truth.
    Evaluate(EvaluateArgs),
    /// Cut per-frame descriptor streams into shots and pool shot features.
    Segment(SegmentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianArg {
    Unnormalized,
    Normalized,
}

impl From<LaplacianArg> for LaplacianKind {
    fn from(l: LaplacianArg) -> Self {
        match l {
            LaplacianArg::Unnormalized => LaplacianKind::Unnormalized,
            LaplacianArg::Normalized => LaplacianKind::Normalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Event,
    Frame,
}

impl ModeArg {
    fn scoring(self) -> ScoringMode {
        match self {
            ModeArg::Event => ScoringMode::Event,
            ModeArg::Frame => ScoringMode::Frame,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Event => "event",
            ModeArg::Frame => "frame",
        }
    }
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Dataset directory (view_<k>.csv files and shots.json).
    pub data: PathBuf,
    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Summary lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub lengths: Vec<usize>,
    /// Embedding dimension [default: 2 x number of views].
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Row-sparsity penalty is lambda0 / rho.
    #[arg(long, default_value_t = 10.0)]
    pub rho: f64,
    /// Smoothing constant, shared by the graph and selection solvers.
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 25)]
    pub max_iters: usize,
    /// Relative objective change at which the optimizer stops.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Sparse-coding penalty divisor of the similarity graph.
    #[arg(long, default_value_t = 10.0)]
    pub graph_rho: f64,
    #[arg(long, default_value_t = 100)]
    pub graph_max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub graph_tol: f64,
    #[arg(long, value_enum, default_value_t = LaplacianArg::Unnormalized)]
    pub laplacian: LaplacianArg,
    /// Spread each summary over equal time bins.
    #[arg(long)]
    pub coverage: bool,
    /// Penalize long shots in the selection.
    #[arg(long)]
    pub weighted: bool,
    /// Extra optimizer runs from perturbed starts.
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Score every summary; needs ground truth.
    #[arg(long)]
    pub evaluate: bool,
    /// Ground truth file [default: <data>/ground_truth.json when present].
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Event)]
    pub mode: ModeArg,
    /// Also write the affinity matrix W and the Laplacian L as CSV.
    #[arg(long)]
    pub dump_graph: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub views: usize,
    #[arg(long, default_value_t = 3)]
    pub prototypes: usize,
    /// Copies of every prototype in every view.
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    /// Noise norm relative to the unit-norm prototypes.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, default_value_t = 48)]
    pub shot_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub summary: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Event)]
    pub mode: ModeArg,
    /// Where to write the metrics JSON [default: next to the summary].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// One per-frame CSV per view, in view order.
    #[arg(long, required = true, num_args = 1..)]
    pub frames: Vec<PathBuf>,
    /// Output dataset directory.
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.75)]
    pub change_fraction: f64,
    #[arg(long, default_value_t = 32)]
    pub min_len: usize,
    #[arg(long, default_value_t = 96)]
    pub max_len: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Summarize(a) => summarize(&a),
        Command::Synth(a) => synth(&a),
        Command::Evaluate(a) => evaluate_cmd(&a),
        Command::Segment(a) => segment(&a),
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Serialize)]
struct SolverManifest {
    epsilon: f64,
    max_iters: usize,
    rel_tol: f64,
}

#[derive(Debug, Serialize)]
struct GraphManifest {
    rho: f64,
    laplacian: LaplacianArg,
    solver: SolverManifest,
}

#[derive(Debug, Serialize)]
struct JointManifest {
    alpha: f64,
    rho: f64,
    epsilon: f64,
    max_iters: usize,
    rel_tol: f64,
    dim: usize,
    zero_tol: f64,
    weighted: bool,
    shot_weights: Option<Vec<f64>>,
    restarts: usize,
    restart_scale: f64,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    data: String,
    ground_truth: Option<String>,
    num_views: usize,
    num_shots: usize,
    feature_dim: usize,
    graph: GraphManifest,
    joint: JointManifest,
    lambda0: f64,
    lambda: f64,
    iterations: usize,
    converged: bool,
    lengths: Vec<usize>,
    coverage: bool,
    scoring_mode: Option<ModeArg>,
    outputs: Vec<String>,
}

fn summary_file(len: usize) -> String {
    format!("summary_{len}.json")
}

fn pipeline_config(a: &SummarizeArgs) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        graph: GraphConfig {
            solver: SolverConfig {
                epsilon: a.epsilon,
                max_iters: a.graph_max_iters,
                rel_tol: a.graph_tol,
            },
            rho: a.graph_rho,
            laplacian: a.laplacian.into(),
        },
        dim: a.dim,
        weighted: a.weighted,
        ..PipelineConfig::default()
    };
    let j = &mut cfg.joint;
    j.alpha = a.alpha;
    j.rho = a.rho;
    j.epsilon = a.epsilon;
    j.max_iters = a.max_iters;
    j.rel_tol = a.tol;
    j.restarts = a.restarts;
    j.seed = a.seed;
    cfg
}

fn check_summarize_args(a: &SummarizeArgs) -> Result<()> {
    if a.lengths.is_empty() || a.lengths.contains(&0) {
        return Err(CliError::Usage("--lengths needs one or more positive lengths".into()));
    }
    if !(a.alpha > 0.0) {
        return Err(CliError::Usage(format!("--alpha must be positive, got {}", a.alpha)));
    }
    if !(a.rho > 1.0) || !(a.graph_rho > 1.0) {
        return Err(CliError::Usage("--rho and --graph-rho must exceed 1".into()));
    }
    if !(a.epsilon > 0.0) || !(a.tol > 0.0) || !(a.graph_tol > 0.0) {
        return Err(CliError::Usage("--epsilon, --tol and --graph-tol must be positive".into()));
    }
    if a.max_iters == 0 || a.graph_max_iters == 0 {
        return Err(CliError::Usage("iteration limits must be at least 1".into()));
    }
    Ok(())
}

fn summarize(a: &SummarizeArgs) -> Result<()> {
    check_summarize_args(a)?;
    let gt_path = match (&a.gt, a.evaluate) {
        (Some(p), _) => Some(p.clone()),
        (None, true) => {
            let default = a.data.join(io::GROUND_TRUTH_FILE);
            if !default.exists() {
                return Err(CliError::Usage(format!(
                    "ground truth required: --evaluate needs --gt or {}",
                    default.display()
                )));
            }
            Some(default)
        }
        (None, false) => None,
    };
    let gt = match (&gt_path, a.evaluate) {
        (Some(p), true) => Some(io::read_ground_truth(p)?),
        _ => None,
    };

    let dataset = io::load_dataset(&a.data)?;
    let cfg = pipeline_config(a);
    let analysis = Analysis::run(&dataset, &cfg)?;

    create_dir(&a.out)?;
    let mut outputs = Vec::new();
    let mut emit = |name: String, text: String| -> Result<()> {
        io::write_text(&a.out.join(&name), &text)?;
        outputs.push(name);
        Ok(())
    };

    emit("curve.csv".into(), io::format_curve(&analysis.curve, &analysis.shots))?;
    emit("trace.csv".into(), io::format_trace(&analysis.solution.trace))?;
    if a.dump_graph {
        emit("graph_W.csv".into(), io::format_matrix_csv(&analysis.graph.w))?;
        emit("graph_L.csv".into(), io::format_matrix_csv(&analysis.graph.laplacian))?;
    }
    let mut lengths = a.lengths.clone();
    lengths.sort_unstable();
    lengths.dedup();
    for &len in &lengths {
        let summary = analysis.summary(len, a.coverage);
        emit(summary_file(len), io::format_summary(&summary))?;
        let shots: Vec<String> = summary.entries.iter().map(|e| format!("v{}s{}", e.view, e.shot)).collect();
        let mut line = format!("length {len}: {}", shots.join(" "));
        if let Some(gt) = &gt {
            let m = evaluate(&summary, gt, a.mode.scoring())?;
            let doc = io::metrics_json(&m, a.mode.name());
            emit(format!("metrics_{len}.json"), io::format_metrics(&doc))?;
            line.push_str(&format!("  P={:.4} R={:.4} F={:.4}", m.precision, m.recall, m.f_measure));
        }
        println!("{line}");
    }

    let trace = &analysis.solution.trace;
    let j = &analysis.joint;
    let manifest = RunManifest {
        tool: "mvsumm",
        version: env!("CARGO_PKG_VERSION"),
        data: a.data.display().to_string(),
        ground_truth: gt.as_ref().and(gt_path.as_ref()).map(|p| p.display().to_string()),
        num_views: dataset.num_views(),
        num_shots: dataset.num_shots(),
        feature_dim: dataset.dim(),
        graph: GraphManifest {
            rho: cfg.graph.rho,
            laplacian: a.laplacian,
            solver: SolverManifest {
                epsilon: cfg.graph.solver.epsilon,
                max_iters: cfg.graph.solver.max_iters,
                rel_tol: cfg.graph.solver.rel_tol,
            },
        },
        joint: JointManifest {
            alpha: j.alpha,
            rho: j.rho,
            epsilon: j.epsilon,
            max_iters: j.max_iters,
            rel_tol: j.rel_tol,
            dim: j.dim,
            zero_tol: j.zero_tol,
            weighted: a.weighted,
            shot_weights: j.shot_weights.clone(),
            restarts: j.restarts,
            restart_scale: j.restart_scale,
            seed: j.seed,
        },
        lambda0: trace.lambda0,
        lambda: trace.lambda,
        iterations: trace.iterations(),
        converged: trace.converged,
        lengths,
        coverage: a.coverage,
        scoring_mode: gt.as_ref().map(|_| a.mode),
        outputs: outputs.clone(),
    };
    io::write_text(&a.out.join("manifest.json"), &io::format_manifest(&manifest))?;
    if !trace.converged {
        eprintln!(
            "warning: optimizer stopped after {} iterations without reaching --tol {}",
            trace.iterations(),
            j.rel_tol
        );
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let cfg = SyntheticConfig {
        num_views: a.views,
        prototypes: a.prototypes,
        copies_per_prototype: a.copies,
        dim: a.dim,
        noise_sigma: a.sigma,
        shot_len: a.shot_len,
        seed: a.seed,
    };
    let data = generate_synthetic(&cfg)?;
    io::write_dataset(&a.out, &data.dataset)?;
    io::write_text(&a.out.join(io::GROUND_TRUTH_FILE), &io::format_ground_truth(&data.ground_truth))?;
    println!(
        "{} views, {} shots, {} events -> {}",
        data.dataset.num_views(),
        data.dataset.num_shots(),
        data.ground_truth.events.len(),
        a.out.display()
    );
    Ok(())
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<()> {
    let summary = io::read_summary(&a.summary)?;
    let gt = io::read_ground_truth(&a.gt)?;
    let m = evaluate(&summary, &gt, a.mode.scoring())?;
    let text = io::format_metrics(&io::metrics_json(&m, a.mode.name()));
    let out = a.out.clone().unwrap_or_else(|| {
        let stem = a.summary.file_stem().map_or("summary".into(), |s| s.to_string_lossy().into_owned());
        a.summary.with_file_name(format!("{stem}.metrics.json"))
    });
    io::write_text(&out, &text)?;
    print!("{text}");
    Ok(())
}

fn segment(a: &SegmentArgs) -> Result<()> {
    let cfg = SegmentConfig {
        change_fraction: a.change_fraction,
        min_len: a.min_len,
        max_len: a.max_len,
    };
    let mut views = Vec::new();
    let mut shots = Vec::new();
    for (k, path) in a.frames.iter().enumerate() {
        let frames = io::parse_frames_csv(&io::read_text(path)?, path)?;
        let ranges = segment_shots(&frames, &cfg)?;
        views.push(pool_shot_features(&frames, &ranges)?);
        shots.extend(
            ranges
                .iter()
                .enumerate()
                .map(|(j, &(s, e))| ShotRecord::new(k + 1, j + 1, s, e)),
        );
        println!("view {}: {} frames, {} shots", k + 1, frames.len(), ranges.len());
    }
    let dataset = MultiViewDataset::new(views, shots)?;
    io::write_dataset(&a.out, &dataset)?;
    Ok(())
}
