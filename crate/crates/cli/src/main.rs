//! `gcalc`: graph enumeration, operator and weight computations, and the verification
//! suite, each writing one structured document to standard output.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or input errors.

#![forbid(unsafe_code)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use config::{FileConfig, Flags, Settings, SEED_ENV};
use report::Format;

#[derive(Debug, Parser)]
#[command(name = "gcalc", version, about = "Graph-complex calculus for Poisson structures")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_parser = parse_format_arg)]
    format: Option<Format>,
    /// TOML file with defaults for the global flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the Monte Carlo streams (default from GCALC_SEED, else 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count; accepts scientific notation (1e7).
    #[arg(long, global = true, value_parser = parse_samples_arg)]
    samples: Option<u64>,
    /// Number of independent sample shards.
    #[arg(long, global = true)]
    shards: Option<usize>,
    /// Map from the unit cube to configurations: mixture, polar or tan.
    #[arg(long, global = true)]
    transform: Option<String>,
    /// Dimension of the coordinate space (all coordinates even).
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Comma-separated coordinate degrees, overriding --dim.
    #[arg(long, global = true)]
    grading: Option<String>,
    /// Number of standard errors allowed in statistical checks.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: commands::Command,
}

fn parse_format_arg(s: &str) -> std::result::Result<Format, String> {
    s.parse::<Format>().map_err(|e| e.to_string())
}

fn parse_samples_arg(s: &str) -> std::result::Result<u64, String> {
    config::parse_samples(s).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<report::Report> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = Flags {
        format: cli.format,
        seed: cli.seed,
        samples: cli.samples,
        shards: cli.shards,
        transform: cli.transform,
        dim: cli.dim,
        grading: cli.grading,
        tolerance: cli.tolerance,
    };
    let settings = Settings::resolve(flags, file, std::env::var(SEED_ENV).ok())?;
    let report = commands::execute(&cli.command, &settings)?;
    print!("{}", report.render(settings.format)?);
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(r) if r.failed() => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
