//! `fastrcs` — robust regression outlier detection from the command line.
//!
//! Subcommands: `fit` (analyze a CSV dataset), `simulate` (contamination
//! sweeps producing tidy curve CSVs), `bench` (side-by-side estimator
//! comparison on one dataset), and `generate` (write one simulated sample
//! with its ground-truth outlier indices).
//!
//! Exit codes: 0 success, 2 bad flags, 3 unreadable or ill-formed CSV,
//! 4 numerical failure (every candidate subset degenerate).

mod bench;
mod csvio;
mod fit;
mod generate;
mod report;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// A command failure carrying the documented process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn csv(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "fastrcs",
    version,
    about = "Robust regression outlier detection: residual-congruence subset search and an LTS baseline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a CSV dataset and write a per-row outlyingness report
    Fit(fit::FitArgs),
    /// Run a contamination sweep and write curve points plus summaries
    Simulate(simulate::SimulateArgs),
    /// Time and compare the estimators on one dataset
    Bench(bench::BenchArgs),
    /// Generate one contaminated sample with ground-truth outlier indices
    Generate(generate::GenerateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(args) => fit::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Generate(args) => generate::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
