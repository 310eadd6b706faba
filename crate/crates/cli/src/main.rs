//! `roman`: multiscale routing for time series from the command line.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 parse or format error
//! (including bad command-line usage), 3 invalid configuration or
//! infeasible geometry, 4 missing baseline or ensemble member.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roman::Error;

#[derive(Debug, Parser)]
#[command(name = "roman", version, about = "Multiscale routing operator for time series")]
struct Cli {
    /// Worker threads for untimed work [default: all cores].
    #[arg(long, global = true, env = "ROMAN_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Route every series of a dataset into a pseudochannel tensor.
    Transform(TransformArgs),
    /// Generate a synthetic mechanism task as .ts train/test files.
    Synth(SynthArgs),
    /// Run a (dataset x config x seed) grid and write benchmark records.
    Bench(BenchArgs),
    /// Win/tie/loss and median[Q1,Q3] summary of benchmark records.
    Summarize(SummarizeArgs),
    /// Mixed-scale against baseline-only hard-voting ensembles.
    Ensemble(EnsembleArgs),
    /// Print version information as JSON.
    Version,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbeKind {
    Pooled,
    Flatten,
}

#[derive(Debug, Args)]
#[group(id = "depth", required = true, multiple = false)]
struct DepthArgs {
    /// Number of pyramid scales S.
    #[arg(long, group = "depth")]
    scales: Option<usize>,
    /// Smallest admissible base length; S is the deepest level reaching it.
    #[arg(long, group = "depth")]
    min_base: Option<usize>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Dataset file (.ts, or label-first TSV/CSV for any other extension).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    depth: DepthArgs,
    /// Target window overlap in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Output directory: one tensor per instance plus manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// position, longrange, multiscale or invariance.
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for <Family>_TRAIN.ts, <Family>_TEST.ts and metadata.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 500)]
    n_train: usize,
    #[arg(long, default_value_t = 250)]
    n_test: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Archive dataset as a path prefix P: loads P_TRAIN.ts and P_TEST.ts
    /// (or .tsv). Repeatable.
    #[arg(long = "dataset")]
    datasets: Vec<PathBuf>,
    /// Synthetic family to generate with --seed. Repeatable.
    #[arg(long = "synth")]
    synth: Vec<String>,
    /// Seed of generated synthetic datasets.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scales to evaluate; must include 1.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    scales: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ProbeKind::Pooled)]
    probe: ProbeKind,
    /// Probe seeds: comma-separated values or inclusive ranges, e.g. 0-9.
    #[arg(long, default_value = "0-4")]
    seeds: String,
    /// Pooled probe kernel count.
    #[arg(long, default_value_t = 2000)]
    kernels: usize,
    /// Flatten probe filter count (0 = ridge on the raw flattened input).
    #[arg(long, default_value_t = 128)]
    filters: usize,
    /// Run cells in parallel; timings are then not comparable.
    #[arg(long)]
    untimed: bool,
    /// Records file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write per-cell test predictions (JSON lines) for `ensemble`.
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    /// Records file; .jsonl is read as JSON lines, anything else as CSV.
    #[arg(long)]
    records: PathBuf,
    /// Scales of the baseline configuration.
    #[arg(long, default_value_t = 1)]
    baseline_scales: usize,
    /// Overlap of the baseline configuration.
    #[arg(long, default_value_t = 0.5)]
    baseline_alpha: f64,
    /// Summary file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    /// Predictions file written by `bench --predictions`.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, value_enum, default_value_t = ProbeKind::Pooled)]
    probe: ProbeKind,
    /// Overlap of the S > 1 members.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Per-dataset comparison file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::UnknownClassLabel { .. }
        | Error::UnequalLength { .. }
        | Error::VersionMismatch { .. }
        | Error::ChecksumMismatch(_)
        | Error::InvalidBlob(_)
        | Error::Json(_)
        | Error::Csv(_) => 2,
        Error::EmptySeries { .. }
        | Error::BufferSize { .. }
        | Error::NonFinite { .. }
        | Error::DepthTooLarge { .. }
        | Error::BaseLengthUnreachable { .. }
        | Error::InvalidAlpha(_)
        | Error::InvalidConfig(_)
        | Error::InfeasibleGeometry(_)
        | Error::DegenerateFeatures(_)
        | Error::ShapeMismatch { .. } => 3,
        Error::MissingBaseline { .. } | Error::MissingMember { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("roman: cannot configure {n} threads: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match cli.command {
        Command::Transform(a) => commands::transform(a),
        Command::Synth(a) => commands::synth(a),
        Command::Bench(a) => commands::bench(a),
        Command::Summarize(a) => commands::summarize(a),
        Command::Ensemble(a) => commands::ensemble(a),
        Command::Version => commands::version(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("roman: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
