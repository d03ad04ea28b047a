//! `fastrcs generate`: write one simulated contaminated sample as CSV plus
//! a sidecar file with the ground-truth outlier indices.

use std::path::PathBuf;

use clap::Args;

use fastrcs::simgen::{generate, ContaminationConfig};

use crate::csvio::{sidecar_path, write_sample};
use crate::simulate::ConfigChoice;
use crate::{CmdResult, Failure};

#[derive(Args)]
pub struct GenerateArgs {
    /// Model dimension including the intercept (p-1 predictor columns)
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    /// Sample size (default 25 * p)
    #[arg(long)]
    pub n: Option<usize>,
    /// Contamination rate in [0, 0.5)
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "pointmass")]
    pub config: ConfigChoice,
    /// Design-space separation of the outlier cluster
    #[arg(long, default_value_t = 8.0)]
    pub dx: f64,
    /// Leverage-standardized vertical separation
    #[arg(long, default_value_t = 4.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sample CSV destination; outlier indices go to `<out>.indices`
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: GenerateArgs) -> CmdResult {
    if args.p < 2 {
        return Err(Failure::usage("--p must be at least 2"));
    }
    if !(0.0..0.5).contains(&args.eps) {
        return Err(Failure::usage("--eps must lie in [0, 0.5)"));
    }
    if args.nu < 0.0 || args.dx < 0.0 {
        return Err(Failure::usage("--nu and --dx must be nonnegative"));
    }
    let configuration = match args.config {
        ConfigChoice::Shift => fastrcs::Contamination::Shift,
        ConfigChoice::Pointmass => fastrcs::Contamination::PointMass,
        ConfigChoice::Both => {
            return Err(Failure::usage("generate needs a single --config, not 'both'"))
        }
    };
    if let Some(n) = args.n {
        if n <= args.p {
            return Err(Failure::usage(format!("--n={n} must exceed --p={}", args.p)));
        }
    }
    let sample = generate(&ContaminationConfig {
        p: args.p,
        n: args.n,
        epsilon: args.eps,
        configuration,
        d_x: args.dx,
        nu: args.nu,
        alpha: args.alpha,
        seed: args.seed,
    });
    write_sample(&args.out, &sample)?;
    println!(
        "n={} p={} outliers={} -> {} (+ {})",
        sample.data.n(),
        sample.data.p(),
        sample.outlier_indices.len(),
        args.out.display(),
        sidecar_path(&args.out).display()
    );
    Ok(())
}
