use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use thickset::cli::{run, ExperimentConfig};
use thickset::Error;

/// Evaluate and stress-test lower bounds for band-limited functions on
/// thick sets.
#[derive(Debug, Parser)]
#[command(name = "thickset", version)]
struct Args {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output file (`.json` for JSON, CSV otherwise); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Json(_) | Error::InvalidConstants(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_FAILED),
            }
        }
    }
}

fn execute(args: &Args) -> thickset::Result<ExitCode> {
    let mut config = ExperimentConfig::load(&args.config)?;
    config.apply_seed_override()?;
    let started = Instant::now();
    let outcome = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?
            .install(|| run(&config))?,
        None => run(&config)?,
    };
    if args.verbose {
        eprintln!(
            "{}: {} rows, {} failures, seed {}, {:.2?}",
            config.command.name(),
            outcome.table.len(),
            outcome.failures.len(),
            config.seed,
            started.elapsed()
        );
    }
    match args.out.as_ref().or(config.out.as_ref()) {
        Some(path) => outcome.table.write_to(path)?,
        None => {
            let bytes = outcome.table.to_csv()?;
            std::io::stdout()
                .lock()
                .write_all(&bytes)
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
        }
    }
    if outcome.passed() {
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!("{} contract violation(s):", outcome.failures.len());
    for line in &outcome.failures {
        eprintln!("  {line}");
    }
    Ok(ExitCode::from(EXIT_FAILED))
}
