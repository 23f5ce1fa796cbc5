//! `gbdt`: runs a configured transformation or the seeded verification suite
//! and writes CSV tables plus a text and JSON report.
//!
//! Exit status: 0 when every check passes, 2 for an invalid configuration,
//! 3 when a check fails, 4 for file-system errors.

mod config;
mod error;
mod modes;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use gbdt::report::Report;
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::{listing, Artifacts};

const DEFAULT_OUT: &str = "gbdt-out";

#[derive(Debug, Parser)]
#[command(name = "gbdt", version, about = "Explicit solutions of dynamical Schrödinger systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        /// Output directory; overrides the one in the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for random inputs; overrides the one in the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply every tolerance by this factor.
        #[arg(long)]
        tol_scale: Option<f64>,
    },
    /// Run the full seeded invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write report.txt and report.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ReportFile<'a> {
    report: &'a Report,
    passed: bool,
    config: &'a RunConfig,
}

fn finish(report: &Report, config: &RunConfig, mut artifacts: Artifacts, out: Option<&Path>) -> Result<bool, CliError> {
    let text = report.render();
    print!("{text}");
    if let Some(dir) = out {
        let json = serde_json::to_string_pretty(&ReportFile {
            report,
            passed: report.passed(),
            config,
        })
        .map_err(|e| CliError::Validation(format!("cannot serialize the report: {e}")))?;
        artifacts.text("report.txt", text);
        artifacts.text("report.json", json + "\n");
        artifacts.write_all(dir)?;
        println!("wrote {} to {}", listing(&artifacts), dir.display());
    }
    Ok(report.passed())
}

fn run(command: Command) -> Result<bool, CliError> {
    let started = Instant::now();
    let passed = match command {
        Command::Run {
            config,
            out,
            seed,
            tol_scale,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(scale) = tol_scale {
                cfg.tol_scale = scale;
            }
            let cfg = cfg.resolve()?;
            let dir = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let outcome = modes::execute(&cfg)?;
            finish(&outcome.report, &cfg, outcome.artifacts, Some(&dir))?
        }
        Command::Verify { seed, out } => {
            let cfg = RunConfig {
                seed,
                ..serde_json::from_str::<RunConfig>(r#"{"mode": "verify"}"#).expect("static config")
            };
            debug_assert_eq!(cfg.mode, Mode::Verify);
            let outcome = modes::execute(&cfg)?;
            finish(&outcome.report, &cfg, outcome.artifacts, out.as_deref())?
        }
    };
    // Timing stays on stdout so that written files depend only on the inputs.
    println!("elapsed: {:.2} s", started.elapsed().as_secs_f64());
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
