//! `curvspec`: batch runner for surface spectra, eigenvalue-inequality
//! verification, crossing-value searches, and integral identity checks.
//!
//! Exit codes: 0 when every checked inequality holds (or the job produced no
//! verdicts), 2 when any check reports a VIOLATION, 1 on execution errors
//! (bad config, unknown surface, solver failure, I/O).

mod config;
mod report;
mod run;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{JobConfig, JobKind};
use curvspec_core::bounds::Verdict;
use report::{Format, Report};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "curvspec",
    version,
    about = "Spectra and curvature-bound checks for surfaces immersed in space forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Job configuration file (flat `key = value` lines with [section] headers);
    /// for `report`, the JSON report to re-encode
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (default: config `out` key, else current directory)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Extra encoding written alongside the JSON report
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<Format>,
    /// Worker threads (fallback: CURVSPEC_THREADS, else all cores)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Override the config seed (governs the default bumpy sphere and solver
    /// start vectors)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute low eigenvalues over a refinement ladder, with extrapolation
    Spectrum(CommonArgs),
    /// Check the eigenvalue comparison inequalities over a weight sweep
    Verify(CommonArgs),
    /// Locate the weight where the scaled second eigenvalue crosses the
    /// round-sphere reference
    Bifurcation(CommonArgs),
    /// Evaluate the classical integral identities on catalog surfaces
    Identities(CommonArgs),
    /// Re-encode an existing JSON report without recomputing
    Report(CommonArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("curvspec: error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let (kind, args) = match cli.command {
        Command::Spectrum(a) => (Some(JobKind::Spectrum), a),
        Command::Verify(a) => (Some(JobKind::Verify), a),
        Command::Bifurcation(a) => (Some(JobKind::Bifurcation), a),
        Command::Identities(a) => (Some(JobKind::Identities), a),
        Command::Report(a) => (None, a),
    };
    init_threads(args.threads)?;
    match kind {
        Some(kind) => run_job(kind, &args),
        None => reencode_report(&args),
    }
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var("CURVSPEC_THREADS") {
            Ok(raw) => Some(
                raw.parse::<usize>()
                    .with_context(|| format!("CURVSPEC_THREADS=`{raw}` is not a thread count"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run_job(kind: JobKind, args: &CommonArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let cfg = JobConfig::from_text(&text, kind, args.seed)?;
    let report = run::run(&cfg)?;

    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = args
        .format
        .or_else(|| cfg.format.as_deref().and_then(Format::parse))
        .unwrap_or(Format::Json);
    finish(&report, &out_dir, format)
}

/// Load a previously written JSON report and re-emit it; by default the new
/// encodings land next to the input file.
fn reencode_report(args: &CommonArgs) -> Result<i32> {
    let report = Report::load(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| args.config.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = args.format.unwrap_or(Format::Json);
    finish(&report, &out_dir, format)
}

fn finish(report: &Report, out_dir: &Path, format: Format) -> Result<i32> {
    let written = report::emit(report, out_dir, format)?;
    print!("{}", report::summarize(report));
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(match report.worst_verdict() {
        Some(Verdict::Violation) => 2,
        _ => 0,
    })
}
