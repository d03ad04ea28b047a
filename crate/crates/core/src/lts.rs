//! Least-trimmed-squares baseline with concentration steps.
//!
//! The benchmark comparator: random (p+1)-starts, initial h-subset from the
//! elemental fit, a couple of cheap concentration steps everywhere, full
//! convergence for the best few finalists, then the same re-weighting and
//! reporting pipeline as the congruence-based estimator so comparisons stay
//! apples-to-apples.

use serde::Serialize;

use crate::dataset::{Dataset, Hyperplane};
use crate::error::{Error, Result};
use crate::numkit::ols_fit;
use crate::rcs::{h_smallest, outlyingness_report, reweight, subset_size_h, FitResult};
use crate::rng::Rng;
use crate::simgen::mp_starts;

const MAX_START_ATTEMPTS: usize = 100;
const MAX_CSTEPS: usize = 100;

/// Tuning knobs of the baseline.
#[derive(Clone, Debug, Serialize)]
pub struct LtsConfig {
    /// Assumed uncontaminated share of the sample, in `[0.5, 1)`.
    pub alpha: f64,
    /// Number of random starting subsets; `None` uses the same clean-start
    /// bound as the congruence search.
    pub num_starts: Option<usize>,
    /// Concentration steps applied to every candidate before shortlisting.
    pub num_csteps_short: usize,
    /// Candidates iterated to convergence.
    pub num_finalists: usize,
    pub seed: u64,
    pub reweight_cutoff: f64,
    pub exact_fit_tol: f64,
}

impl Default for LtsConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            num_starts: None,
            num_csteps_short: 2,
            num_finalists: 10,
            seed: 1,
            reweight_cutoff: 2.5,
            exact_fit_tol: 1e-12,
        }
    }
}

impl LtsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.alpha) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in [0.5, 1), got {}",
                self.alpha
            )));
        }
        if self.num_starts == Some(0) || self.num_finalists == 0 {
            return Err(Error::InvalidInput(
                "num_starts and num_finalists must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One concentration step: fit OLS on the current h-subset and keep the h
/// observations with the smallest squared residuals of that fit. The trimmed
/// RSS never increases. A singular fit leaves the subset unchanged and
/// reports convergence.
pub fn c_step(current: &[usize], data: &Dataset) -> CStep {
    let mut mask = vec![false; data.n()];
    for &i in current {
        mask[i] = true;
    }
    let fit = match ols_fit(data.predictors(), data.response(), Some(&mask)) {
        Ok(f) => f,
        Err(_) => {
            return CStep {
                subset: current.to_vec(),
                converged: true,
            }
        }
    };
    let plane = Hyperplane::from_theta(&fit.theta);
    let sq: Vec<f64> = (0..data.n())
        .map(|i| {
            let r = data.response()[i] - plane.predict(data.xrow(i));
            r * r
        })
        .collect();
    let next = h_smallest(&sq, current.len());
    let converged = next == current;
    CStep {
        subset: next,
        converged,
    }
}

/// Outcome of a concentration step.
#[derive(Clone, Debug)]
pub struct CStep {
    /// Ascending index order, same size as the input.
    pub subset: Vec<usize>,
    pub converged: bool,
}

/// Sum of squared residuals of the subset's own OLS fit over the subset.
pub fn trimmed_rss(subset: &[usize], data: &Dataset) -> Result<f64> {
    let mut mask = vec![false; data.n()];
    for &i in subset {
        mask[i] = true;
    }
    let fit = ols_fit(data.predictors(), data.response(), Some(&mask))?;
    let plane = Hyperplane::from_theta(&fit.theta);
    Ok(subset
        .iter()
        .map(|&i| {
            let r = data.response()[i] - plane.predict(data.xrow(i));
            r * r
        })
        .sum())
}

struct LtsCandidate {
    subset: Vec<usize>,
    rss: f64,
    order: usize,
}

fn evaluate_start(data: &Dataset, h: usize, cfg: &LtsConfig, m: usize) -> Option<LtsCandidate> {
    let mut rng = Rng::substream(cfg.seed, m as u64);
    let n = data.n();
    let p = data.p();

    // elemental start: fit p+1 random rows, resampling degenerate draws
    let mut initial = None;
    for _ in 0..MAX_START_ATTEMPTS {
        let start = rng.sample_distinct(p + 1, n);
        let mut mask = vec![false; n];
        for &i in &start {
            mask[i] = true;
        }
        if let Ok(fit) = ols_fit(data.predictors(), data.response(), Some(&mask)) {
            initial = Some(fit);
            break;
        }
    }
    let fit = initial?;

    let plane = Hyperplane::from_theta(&fit.theta);
    let sq: Vec<f64> = (0..n)
        .map(|i| {
            let r = data.response()[i] - plane.predict(data.xrow(i));
            r * r
        })
        .collect();
    let mut subset = h_smallest(&sq, h);
    for _ in 0..cfg.num_csteps_short {
        let step = c_step(&subset, data);
        subset = step.subset;
        if step.converged {
            break;
        }
    }
    let rss = trimmed_rss(&subset, data).ok()?;
    Some(LtsCandidate {
        subset,
        rss,
        order: m,
    })
}

fn converge(candidate: LtsCandidate, data: &Dataset) -> LtsCandidate {
    let mut subset = candidate.subset;
    for _ in 0..MAX_CSTEPS {
        let step = c_step(&subset, data);
        subset = step.subset;
        if step.converged {
            break;
        }
    }
    let rss = trimmed_rss(&subset, data).unwrap_or(f64::INFINITY);
    LtsCandidate {
        subset,
        rss,
        order: candidate.order,
    }
}

fn finish(data: &Dataset, cfg: &LtsConfig, h: usize, shortlist: Vec<LtsCandidate>) -> Result<FitResult> {
    let total = shortlist.len();
    let best = shortlist
        .into_iter()
        .min_by(|a, b| a.rss.total_cmp(&b.rss).then(a.order.cmp(&b.order)))
        .ok_or(Error::DegenerateData(total))?;

    let mut mask = vec![false; data.n()];
    for &i in &best.subset {
        mask[i] = true;
    }
    let raw = ols_fit(data.predictors(), data.response(), Some(&mask))?;
    let exact_fit = raw.sigma2 == 0.0;
    let rw = reweight(&raw, data, cfg.reweight_cutoff, cfg.exact_fit_tol);
    let report = outlyingness_report(&rw.fit, data, h, cfg.reweight_cutoff, cfg.exact_fit_tol);
    Ok(FitResult {
        h_star: best.subset,
        raw,
        refined: rw.fit,
        criterion: best.rss,
        exact_fit,
        reweight_fallback: rw.fallback,
        report,
    })
}

fn shortlist(mut candidates: Vec<LtsCandidate>, keep: usize) -> Vec<LtsCandidate> {
    candidates.sort_by(|a, b| a.rss.total_cmp(&b.rss).then(a.order.cmp(&b.order)));
    candidates.truncate(keep);
    candidates
}

/// Runs the trimmed-squares baseline sequentially. Deterministic in the
/// seed: candidate substreams, shortlist ordering, and final argmin all tie
/// back to the candidate index.
pub fn fastlts(data: &Dataset, cfg: &LtsConfig) -> Result<FitResult> {
    cfg.validate()?;
    let h = subset_size_h(data.n(), data.p(), cfg.alpha);
    let starts = cfg.num_starts.unwrap_or_else(|| mp_starts(data.p(), cfg.alpha));

    let candidates: Vec<LtsCandidate> = (0..starts)
        .filter_map(|m| evaluate_start(data, h, cfg, m))
        .collect();
    let finalists = shortlist(candidates, cfg.num_finalists)
        .into_iter()
        .map(|c| converge(c, data))
        .collect();
    finish(data, cfg, h, finalists)
}

/// Same baseline with candidates evaluated on `workers` threads; output is
/// bit-identical to the sequential path for any worker count.
#[cfg(feature = "parallel")]
pub fn fastlts_with_workers(data: &Dataset, cfg: &LtsConfig, workers: usize) -> Result<FitResult> {
    if workers <= 1 {
        return fastlts(data, cfg);
    }
    cfg.validate()?;
    let h = subset_size_h(data.n(), data.p(), cfg.alpha);
    let starts = cfg.num_starts.unwrap_or_else(|| mp_starts(data.p(), cfg.alpha));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let finalists: Vec<LtsCandidate> = pool.install(|| {
        use rayon::prelude::*;
        let candidates: Vec<LtsCandidate> = (0..starts)
            .into_par_iter()
            .filter_map(|m| evaluate_start(data, h, cfg, m))
            .collect();
        shortlist(candidates, cfg.num_finalists)
            .into_par_iter()
            .map(|c| converge(c, data))
            .collect()
    });
    finish(data, cfg, h, finalists)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noisy_line(n: usize, outliers: usize, seed: u64) -> Dataset {
        let mut rng = Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n - outliers {
            let x = rng.next_normal();
            rows.push(vec![x]);
            y.push(1.0 + 2.0 * x + 0.1 * rng.next_normal());
        }
        for _ in 0..outliers {
            let x = rng.next_normal();
            rows.push(vec![x]);
            y.push(40.0 + rng.next_normal());
        }
        Dataset::from_rows(&rows, y).unwrap()
    }

    #[test]
    fn c_step_fixed_point() {
        let data = noisy_line(30, 3, 1);
        let h = subset_size_h(30, 2, 0.5);
        // iterate until converged, then one more step must not move
        let mut subset: Vec<usize> = (0..h).collect();
        for _ in 0..50 {
            let step = c_step(&subset, &data);
            let done = step.converged;
            subset = step.subset;
            if done {
                break;
            }
        }
        let again = c_step(&subset, &data);
        assert!(again.converged);
        assert_eq!(again.subset, subset);
    }

    #[test]
    fn c_step_never_increases_trimmed_rss() {
        let mut rng = Rng::seed_from_u64(2);
        for trial in 0..200 {
            let n = 24 + (trial % 7);
            let cols = 1 + (trial % 3);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..cols).map(|_| rng.next_normal()).collect())
                .collect();
            let y: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
            let data = Dataset::from_rows(&rows, y).unwrap();
            let h = subset_size_h(n, cols + 1, 0.5);
            let mut subset = rng.sample_distinct(h, n);
            subset.sort_unstable();
            let before = trimmed_rss(&subset, &data).unwrap();
            let step = c_step(&subset, &data);
            let after = trimmed_rss(&step.subset, &data).unwrap();
            assert!(
                after <= before * (1.0 + 1e-12) + 1e-12,
                "trial {trial}: RSS rose {before} -> {after}"
            );
        }
    }

    #[test]
    fn c_steps_shed_gross_outliers_quickly() {
        let data = noisy_line(40, 3, 3);
        let h = subset_size_h(40, 2, 0.5);
        // start from a subset that contains all three outliers
        let mut subset: Vec<usize> = (0..h - 3).chain(37..40).collect();
        subset.sort_unstable();
        for _ in 0..5 {
            subset = c_step(&subset, &data).subset;
        }
        assert!(subset.iter().all(|&i| i < 37), "outliers kept: {subset:?}");
    }

    #[test]
    fn fastlts_fits_contaminated_line() {
        let data = noisy_line(60, 10, 4);
        let cfg = LtsConfig {
            num_starts: Some(50),
            seed: 5,
            ..LtsConfig::default()
        };
        let res = fastlts(&data, &cfg).unwrap();
        assert!((res.refined.theta[0] - 1.0).abs() < 0.2);
        assert!((res.refined.theta[1] - 2.0).abs() < 0.2);
        // gross vertical outliers are all flagged
        for i in 50..60 {
            assert!(res.report.flags[i]);
        }
    }

    #[test]
    fn fastlts_is_seed_deterministic() {
        let data = noisy_line(40, 5, 6);
        let cfg = LtsConfig {
            num_starts: Some(30),
            seed: 11,
            ..LtsConfig::default()
        };
        let a = fastlts(&data, &cfg).unwrap();
        let b = fastlts(&data, &cfg).unwrap();
        assert_eq!(a.h_star, b.h_star);
        assert_eq!(a.criterion, b.criterion);
        assert_eq!(a.report.flags, b.report.flags);
    }
}
