mod commands;
mod config;

use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::CommonOpts;

/// Detects distribution drift by measuring geometric deformation of a
/// dataset's vector-space representation.
#[derive(Debug, Parser)]
#[command(name = "driftfield", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a baseline from numeric CSV and write it to a baseline file
    Baseline(BaselineArgs),
    /// Compare new CSV data against a baseline file and report deformation
    Detect(DetectArgs),
    /// Compare two text files through the embedding pipeline
    TextDrift(TextDriftArgs),
    /// Write interpolated 2D deformation frames with hulls and force arrows
    Snapshots(SnapshotsArgs),
    /// Evaluate CSV rows from stdin in batches, one report line per batch
    Stream(StreamArgs),
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// Input CSV of baseline points
    #[arg(long, value_name = "CSV")]
    input: PathBuf,
    /// Output baseline file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Treat the first CSV line as feature names
    #[arg(long)]
    has_header: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Baseline file written by `baseline`
    #[arg(long, value_name = "FILE")]
    baseline: PathBuf,
    /// CSV of new points
    #[arg(long = "new", value_name = "CSV")]
    new_data: PathBuf,
    /// Treat the first CSV line as feature names
    #[arg(long)]
    has_header: bool,
    /// Report format on stdout
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Debug, Args)]
struct TextDriftArgs {
    /// Original (baseline) text file
    #[arg(long, value_name = "TXT")]
    original: PathBuf,
    /// Drifted text file
    #[arg(long, value_name = "TXT")]
    drifted: PathBuf,
    /// Embedding table (token TAB comma-separated decimals); the seeded
    /// fallback embedder is used when absent
    #[arg(long, value_name = "FILE")]
    embeddings: Option<PathBuf>,
    /// Fallback embedding dimension
    #[arg(long)]
    dim: Option<usize>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Debug, Args)]
struct SnapshotsArgs {
    /// CSV of baseline points
    #[arg(long, value_name = "CSV")]
    baseline: PathBuf,
    /// CSV of new points
    #[arg(long = "new", value_name = "CSV")]
    new_data: PathBuf,
    /// Treat the first CSV line as feature names
    #[arg(long)]
    has_header: bool,
    /// Comma-separated interpolation fractions (sorted, 0 and 1 included)
    #[arg(long, value_name = "T1,T2,...")]
    fractions: Option<String>,
    /// Output directory for frame_###.json files
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// Baseline file written by `baseline`
    #[arg(long, value_name = "FILE")]
    baseline: PathBuf,
    /// Rows per evaluated batch
    #[arg(long, value_name = "N")]
    batch_size: usize,
    #[command(flatten)]
    common: CommonOpts,
}

fn run(cli: Cli) -> driftfield::Result<i32> {
    match cli.command {
        Command::Baseline(args) => {
            let (cfg, _) = config::resolve(&args.common)?;
            commands::cmd_baseline(&args.input, &args.out, args.has_header, &cfg)
        }
        Command::Detect(args) => {
            let (cfg, _) = config::resolve(&args.common)?;
            commands::cmd_detect(
                &args.baseline,
                &args.new_data,
                args.has_header,
                &args.format,
                &cfg,
            )
        }
        Command::TextDrift(args) => {
            let (cfg, extras) = config::resolve(&args.common)?;
            let dim = args.dim.unwrap_or(extras.dim);
            commands::cmd_text_drift(
                &args.original,
                &args.drifted,
                args.embeddings.as_deref(),
                dim,
                &cfg,
            )
        }
        Command::Snapshots(args) => {
            let (cfg, extras) = config::resolve(&args.common)?;
            let fractions = commands::effective_fractions(args.fractions.as_deref(), &extras)?;
            commands::cmd_snapshots(
                &args.baseline,
                &args.new_data,
                args.has_header,
                &fractions,
                &args.out,
                &cfg,
            )
        }
        Command::Stream(args) => {
            let (cfg, _) = config::resolve(&args.common)?;
            let stdin = std::io::stdin();
            let mut input = BufReader::new(stdin.lock());
            let mut output = std::io::stdout().lock();
            commands::cmd_stream(
                &args.baseline,
                args.batch_size,
                &cfg,
                &mut input,
                &mut output,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
