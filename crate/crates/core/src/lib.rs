//! Robust regression outlier detection by residual-congruence subset
//! search, with a least-trimmed-squares baseline, an adversarial
//! contamination generator, and the evaluation metrics to compare them.
//!
//! The main entry points are [`fastrcs`] and [`fastlts`], which both take a
//! [`Dataset`] and return a [`FitResult`] holding the selected h-subset,
//! the raw and re-weighted fits, and a per-observation
//! [`OutlyingnessReport`]. [`simgen::generate`] produces contaminated
//! samples with known ground truth, and [`harness::run_cell`] ties
//! generator, estimators, and [`metrics`] together for simulation sweeps.
//!
//! Everything is deterministic in the configured seed, including under the
//! optional `parallel` feature: candidate subsets and simulation cells draw
//! from per-index substreams, and reductions run in index order.

pub mod dataset;
pub mod error;
pub mod harness;
pub mod lts;
pub mod metrics;
pub mod numkit;
pub mod rcs;
pub mod rng;
pub mod simgen;

pub use dataset::{Dataset, Hyperplane};
pub use error::{Error, Result};
pub use lts::{fastlts, LtsConfig};
pub use numkit::OlsFit;
pub use rcs::{fastrcs, subset_size_h, FitResult, OutlyingnessReport, RcsConfig};
pub use simgen::{generate, Contamination, ContaminationConfig, GeneratedSample};

#[cfg(feature = "parallel")]
pub use lts::fastlts_with_workers;
#[cfg(feature = "parallel")]
pub use rcs::fastrcs_with_workers;
