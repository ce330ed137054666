//! Batch command-line front end for the mask-learning experiments.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 infeasible volume
//! budget, 4 numeric failure.

mod commands;
mod config;
mod pool;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphmask_core::infer::InferError;
use graphmask_core::inpaint::InpaintError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<graphmask_core::ingest::IngestError> for CliError {
    fn from(e: graphmask_core::ingest::IngestError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<graphmask_core::synth::SynthError> for CliError {
    fn from(e: graphmask_core::synth::SynthError) -> Self {
        match e {
            graphmask_core::synth::SynthError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<InferError> for CliError {
    fn from(e: InferError) -> Self {
        match &e {
            InferError::InfeasibleVolume { .. } => CliError::Infeasible(e.to_string()),
            InferError::InvalidConfig(_) | InferError::EmptyUnion => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<InpaintError> for CliError {
    fn from(e: InpaintError) -> Self {
        match &e {
            InpaintError::Learning { source, .. } => match source.as_ref() {
                InferError::InfeasibleVolume { .. } => CliError::Infeasible(e.to_string()),
                _ => CliError::Numeric(e.to_string()),
            },
            InpaintError::TooFewColumns | InpaintError::NoObservations => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "graphmask",
    about = "Learn the global graph behind smooth signals by mask combination of multi-layer graphs",
    version
)]
struct Cli {
    /// JSON file supplying defaults for any long flag of the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark instance directory.
    Synth(SynthArgs),
    /// Learn a global graph and write the result document.
    Learn(LearnArgs),
    /// Evaluate a learned result against ground truth.
    Eval(EvalArgs),
    /// Run a seeded experiment grid and emit mean-metric tables.
    Sweep(SweepArgs),
    /// Leave-one-column-out inpainting comparison.
    Inpaint(InpaintArgs),
    /// Render a sweep table to SVG charts and columnar data.
    Plot(PlotArgs),
    /// Regenerate the bundled synthetic fixtures.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
pub struct SynthArgs {
    /// Vertex count.
    #[arg(long)]
    n: Option<usize>,
    /// Number of smooth signals.
    #[arg(long)]
    k: Option<usize>,
    /// Coverability target in (0, 1].
    #[arg(long)]
    coverability: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Gaussian kernel width.
    #[arg(long)]
    sigma: Option<f64>,
    /// Mask reservation threshold.
    #[arg(long)]
    tau: Option<f64>,
    /// Distance quantile for the union support.
    #[arg(long)]
    edge_quantile: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct LearnArgs {
    /// Learning method: ml, ml-reduced, gl-sigrep, gl-informed or gl-conv.
    #[arg(long)]
    method: String,
    /// Synthetic instance directory (layers plus signals).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Comma-separated layer edge-list files.
    #[arg(long)]
    layers: Option<String>,
    /// Signal CSV (rows are vertices).
    #[arg(long)]
    signals: Option<PathBuf>,
    /// Weather-style fixture directory.
    #[arg(long)]
    weather: Option<PathBuf>,
    /// Measurement name for weather input.
    #[arg(long)]
    measurement: Option<String>,
    /// Office-style fixture directory.
    #[arg(long)]
    office: Option<PathBuf>,
    /// Layer sparsity for weather feature layers.
    #[arg(long)]
    sparsity: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Interpret gamma relative to the squared signal norm.
    #[arg(long)]
    gamma_auto: bool,
    #[arg(long)]
    trace: Option<f64>,
    /// Simplex regularizer of gl-conv.
    #[arg(long)]
    beta: Option<f64>,
    /// Result JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Learned result document.
    #[arg(long)]
    result: PathBuf,
    /// Synthetic instance directory holding the ground truth.
    #[arg(long)]
    truth: PathBuf,
    /// Optional JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Swept parameter: coverability, k or snr.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long)]
    values: Option<String>,
    /// Comma-separated methods.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Base coverability when the axis is k or snr.
    #[arg(long)]
    coverability: Option<f64>,
    /// Repetitions per grid cell.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed mask-learning gamma; defaults to the coverability schedule.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    sigrep_gamma: Option<f64>,
    #[arg(long)]
    informed_gamma: Option<f64>,
    #[arg(long)]
    conv_beta: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct InpaintArgs {
    /// Weather-style fixture directory.
    #[arg(long)]
    weather: PathBuf,
    #[arg(long)]
    measurement: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    sparsity: Option<f64>,
    /// Mask-learning gamma for the ml method.
    #[arg(long)]
    ml_gamma: Option<f64>,
    #[arg(long)]
    sigrep_gamma: Option<f64>,
    #[arg(long)]
    informed_gamma: Option<f64>,
    #[arg(long)]
    conv_beta: Option<f64>,
    /// Tikhonov weight of the recovery.
    #[arg(long)]
    inpaint_gamma: Option<f64>,
    /// Fraction of vertices hidden per round.
    #[arg(long)]
    holdout: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the score table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Sweep table (TSV) produced by the sweep command.
    #[arg(long)]
    table: PathBuf,
    /// Output directory for SVG charts and columnar data.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct FixturesArgs {
    /// Directory receiving synthetic_weather/ and synthetic_office/.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe, like other line-oriented tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let config = match config::load(cli.config.as_deref()) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Synth(args) => commands::synth(args, &config),
        Command::Learn(args) => commands::learn(args, &config),
        Command::Eval(args) => commands::eval(args, &config),
        Command::Sweep(args) => commands::sweep(args, &config),
        Command::Inpaint(args) => commands::inpaint(args, &config),
        Command::Plot(args) => commands::plot(args, &config),
        Command::Fixtures(args) => commands::fixtures(args, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
