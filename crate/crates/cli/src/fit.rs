//! `fastrcs fit`: analyze one CSV dataset.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use fastrcs::harness::Algo;
use fastrcs::lts::LtsConfig;
use fastrcs::rcs::subset_size_h;
use fastrcs::{Dataset, Error, FitResult, RcsConfig};

use crate::csvio::{read_dataset, write_atomic};
use crate::report::FitReport;
use crate::{CmdResult, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
pub struct FitArgs {
    /// Input CSV with a header row
    pub input: PathBuf,
    /// Name of the response column; every other column is a predictor
    #[arg(long)]
    pub response: String,
    /// Estimator to run
    #[arg(long, default_value = "rcs")]
    pub algo: Algo,
    /// Assumed uncontaminated share of the sample, in [0.5, 1)
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Hyperplanes drawn per subset and growing stage
    #[arg(long, default_value_t = 25)]
    pub k: usize,
    /// Growing stages
    #[arg(long = "l-stages", default_value_t = 3)]
    pub l_stages: usize,
    /// Number of starting subsets (default: derived from the clean-start
    /// probability bound)
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Standardized-residual cutoff of the re-weighting and flagging rules
    #[arg(long, default_value_t = 2.5)]
    pub cutoff: f64,
    /// Report destination; stdout when omitted (summary then goes to stderr)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// Candidate-evaluation threads (1 = sequential; results are identical
    /// for any value)
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

pub fn validate_common(alpha: f64, cutoff: f64, k: usize, l: usize) -> CmdResult {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Failure::usage(format!("--alpha must lie in [0.5, 1), got {alpha}")));
    }
    if !(cutoff > 0.0) {
        return Err(Failure::usage("--cutoff must be positive"));
    }
    if k == 0 || l == 0 {
        return Err(Failure::usage("--k and --l-stages must be at least 1"));
    }
    Ok(())
}

pub fn run_estimator(
    data: &Dataset,
    algo: Algo,
    alpha: f64,
    k: usize,
    l_stages: usize,
    starts: Option<usize>,
    seed: u64,
    cutoff: f64,
    workers: usize,
) -> Result<FitResult, Failure> {
    let map_err = |e: Error| match e {
        Error::DegenerateData(_) | Error::Singular => Failure::numeric(e.to_string()),
        Error::InvalidInput(msg) => Failure::usage(msg),
    };
    match algo {
        Algo::Rcs => {
            let cfg = RcsConfig {
                alpha,
                k,
                l: l_stages,
                num_starts: starts,
                seed,
                reweight_cutoff: cutoff,
                ..RcsConfig::default()
            };
            run_rcs(data, &cfg, workers).map_err(map_err)
        }
        Algo::Lts => {
            let cfg = LtsConfig {
                alpha,
                num_starts: starts,
                seed,
                reweight_cutoff: cutoff,
                ..LtsConfig::default()
            };
            run_lts(data, &cfg, workers).map_err(map_err)
        }
    }
}

fn run_rcs(data: &Dataset, cfg: &RcsConfig, workers: usize) -> Result<FitResult, Error> {
    if workers > 1 {
        fastrcs::fastrcs_with_workers(data, cfg, workers)
    } else {
        fastrcs::fastrcs(data, cfg)
    }
}

fn run_lts(data: &Dataset, cfg: &LtsConfig, workers: usize) -> Result<FitResult, Error> {
    if workers > 1 {
        fastrcs::fastlts_with_workers(data, cfg, workers)
    } else {
        fastrcs::fastlts(data, cfg)
    }
}

pub fn run(args: FitArgs) -> CmdResult {
    validate_common(args.alpha, args.cutoff, args.k, args.l_stages)?;
    let (data, _) = read_dataset(&args.input, &args.response)?;
    let result = run_estimator(
        &data,
        args.algo,
        args.alpha,
        args.k,
        args.l_stages,
        args.starts,
        args.seed,
        args.cutoff,
        args.workers,
    )?;
    let h = subset_size_h(data.n(), data.p(), args.alpha);
    let report = FitReport::new(args.algo.name(), data.n(), h, args.alpha, args.seed, &result);
    let body = match args.format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    match &args.out {
        Some(path) => {
            write_atomic(path, body.as_bytes())?;
            println!("{}", report.summary_line());
        }
        None => {
            println!("{body}");
            eprintln!("{}", report.summary_line());
        }
    }
    Ok(())
}
