//! `fastrcs simulate`: full-factorial contamination sweeps.
//!
//! One curve point per (cell, replication, algorithm), plus a summary CSV
//! (median and 75th percentile per cell) next to the main output. Cells may
//! be evaluated concurrently; row order is fixed by cell index, and every
//! cell draws its own seed substream, so output is identical for any worker
//! count.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use fastrcs::harness::{run_cells_with_workers, Algo, CellSpec, SweepKnobs};
use fastrcs::metrics::{summarize, CurvePoint};
use fastrcs::simgen::Contamination;

use crate::csvio::write_atomic;
use crate::{CmdResult, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum ConfigChoice {
    Shift,
    Pointmass,
    Both,
}

impl ConfigChoice {
    fn expand(self) -> Vec<Contamination> {
        match self {
            ConfigChoice::Shift => vec![Contamination::Shift],
            ConfigChoice::Pointmass => vec![Contamination::PointMass],
            ConfigChoice::Both => vec![Contamination::Shift, Contamination::PointMass],
        }
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Model dimensions to sweep (comma separated)
    #[arg(long = "p-list", default_value = "4", value_delimiter = ',')]
    pub p_list: Vec<usize>,
    /// Contamination rates; defaults to the protocol preset for --alpha
    /// (0.1,0.2,0.3,0.4 at alpha 0.5 and 0.1,0.2 at alpha 0.75)
    #[arg(long = "eps-list", value_delimiter = ',')]
    pub eps_list: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "both")]
    pub config: ConfigChoice,
    /// Design-space separations of the outlier cluster
    #[arg(long = "dx-list", default_value = "2,8", value_delimiter = ',')]
    pub dx_list: Vec<f64>,
    /// Vertical separations
    #[arg(long = "nu-list", default_value = "1,2,3,4,5,6,7,8,9,10", value_delimiter = ',')]
    pub nu_list: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Replications per cell
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value = "rcs,lts", value_delimiter = ',')]
    pub algos: Vec<Algo>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Curve-point CSV destination; the summary lands next to it
    #[arg(long)]
    pub out: PathBuf,
    /// Sample size per cell (default 25 * p)
    #[arg(long)]
    pub n: Option<usize>,
    /// Cell-evaluation threads (0 = all cores); output is order-stable
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

pub fn run(args: SimulateArgs) -> CmdResult {
    if !(0.5..1.0).contains(&args.alpha) {
        return Err(Failure::usage(format!(
            "--alpha must lie in [0.5, 1), got {}",
            args.alpha
        )));
    }
    let eps_list = args.eps_list.clone().unwrap_or_else(|| {
        if args.alpha >= 0.75 {
            vec![0.1, 0.2]
        } else {
            vec![0.1, 0.2, 0.3, 0.4]
        }
    });
    if args.p_list.is_empty()
        || eps_list.is_empty()
        || args.dx_list.is_empty()
        || args.nu_list.is_empty()
        || args.algos.is_empty()
        || args.reps == 0
    {
        return Err(Failure::usage("empty sweep grid"));
    }
    for &p in &args.p_list {
        if p < 2 {
            return Err(Failure::usage(format!("p must be at least 2, got {p}")));
        }
        let n = args.n.unwrap_or(25 * p);
        if n <= p {
            return Err(Failure::usage(format!("n={n} must exceed p={p}")));
        }
    }
    for &eps in &eps_list {
        if !(0.0..0.5).contains(&eps) {
            return Err(Failure::usage(format!("epsilon must lie in [0, 0.5), got {eps}")));
        }
    }
    for &nu in &args.nu_list {
        if nu < 0.0 {
            return Err(Failure::usage(format!("nu must be nonnegative, got {nu}")));
        }
    }

    let mut cells: Vec<CellSpec> = Vec::new();
    for &configuration in &args.config.expand() {
        for &p in &args.p_list {
            for &epsilon in &eps_list {
                for &d_x in &args.dx_list {
                    for &nu in &args.nu_list {
                        cells.push(CellSpec {
                            configuration,
                            p,
                            n: args.n,
                            epsilon,
                            d_x,
                            alpha: args.alpha,
                            nu,
                        });
                    }
                }
            }
        }
    }

    let knobs = SweepKnobs::default();
    let points = run_cells_with_workers(&cells, &args.algos, args.reps, args.seed, &knobs, args.workers)
        .map_err(|e| Failure::numeric(e.to_string()))?;

    write_atomic(&args.out, serialize_points(&points)?.as_bytes())?;
    let summary = summarize(&points);
    let summary_path = summary_sibling(&args.out);
    write_atomic(&summary_path, serialize_summary(&summary)?.as_bytes())?;
    println!(
        "wrote {} curve points across {} cells to {} (summary: {})",
        points.len(),
        cells.len(),
        args.out.display(),
        summary_path.display()
    );
    Ok(())
}

fn serialize_points(points: &[CurvePoint]) -> Result<String, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for point in points {
        writer
            .serialize(point)
            .map_err(|e| Failure::io(format!("serializing curve point: {e}")))?;
    }
    finish(writer)
}

fn serialize_summary(rows: &[fastrcs::metrics::SummaryRow]) -> Result<String, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Failure::io(format!("serializing summary row: {e}")))?;
    }
    finish(writer)
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Failure::io(format!("flushing csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::io(e.to_string()))
}

/// `points.csv` -> `points.summary.csv`.
pub fn summary_sibling(path: &Path) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.summary.{}", ext.to_string_lossy()),
        None => format!("{stem}.summary"),
    };
    path.with_file_name(name)
}
