//! Residual-congruence subset search.
//!
//! The estimator draws many random (p+1)-point starting subsets, grows each
//! into an h-subset by ranking all observations on averaged normalized
//! squared residuals against hyperplanes fitted through points of the
//! current subset, scores every grown subset with the incongruence index,
//! and keeps the most congruent one. OLS on that subset gives the raw fit;
//! a one-step re-weighting against a median-based robust scale gives the
//! final fit and the outlyingness report.

use serde::Serialize;

use crate::dataset::{Dataset, Hyperplane};
use crate::error::{Error, Result};
use crate::numkit::{median, normal_quantile, ols_fit, solve_linear, Matrix, OlsFit};
use crate::rng::Rng;
use crate::simgen::mp_starts;

/// Abandon a candidate subset after this many consecutive unusable
/// hyperplane draws (singular point sets or denominator-degenerate planes).
const MAX_CONSECUTIVE_FAILURES: usize = 100;

/// Tuning knobs for the subset search.
#[derive(Clone, Debug, Serialize)]
pub struct RcsConfig {
    /// Assumed uncontaminated share of the sample, in `[0.5, 1)`.
    pub alpha: f64,
    /// Hyperplanes drawn per subset and growing stage.
    pub k: usize,
    /// Number of growing stages from size p+1 to size h.
    pub l: usize,
    /// Number of random starting subsets; `None` derives the count from the
    /// clean-start probability bound at 99% confidence.
    pub num_starts: Option<usize>,
    pub seed: u64,
    /// Standardized-residual cutoff of the re-weighting step.
    pub reweight_cutoff: f64,
    /// Residuals at or below this magnitude count as exactly on a plane.
    pub exact_fit_tol: f64,
}

impl Default for RcsConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            k: 25,
            l: 3,
            num_starts: None,
            seed: 1,
            reweight_cutoff: 2.5,
            exact_fit_tol: 1e-12,
        }
    }
}

impl RcsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.alpha) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in [0.5, 1), got {}",
                self.alpha
            )));
        }
        if self.k < 1 || self.l < 1 {
            return Err(Error::InvalidInput("K and L must be at least 1".into()));
        }
        if self.num_starts == Some(0) {
            return Err(Error::InvalidInput("num_starts must be at least 1".into()));
        }
        if !(self.reweight_cutoff > 0.0) || !self.reweight_cutoff.is_finite() {
            return Err(Error::InvalidInput("reweight cutoff must be positive".into()));
        }
        if !(self.exact_fit_tol >= 0.0) || !self.exact_fit_tol.is_finite() {
            return Err(Error::InvalidInput("exact_fit_tol must be nonnegative".into()));
        }
        Ok(())
    }

    pub(crate) fn resolved_starts(&self, p: usize) -> usize {
        self.num_starts.unwrap_or_else(|| mp_starts(p, self.alpha))
    }
}

/// Per-observation diagnostics of a finished fit.
#[derive(Clone, Debug, Serialize)]
pub struct OutlyingnessReport {
    /// `r_i / sigma_hat`; for an exact fit (zero scale) on-plane points get
    /// 0 and off-plane points +inf.
    pub standardized_residuals: Vec<f64>,
    /// Indices of the h smallest raw residuals (ascending index order).
    pub h_plus: Vec<usize>,
    /// Indices whose standardized residual is at most the cutoff.
    pub good_set: Vec<usize>,
    /// `flags[i]` is true exactly when `i` is not in the good set.
    pub flags: Vec<bool>,
}

/// Output of the subset-search estimators (shared by the LTS baseline).
#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    /// The selected h-subset, ascending index order.
    pub h_star: Vec<usize>,
    /// OLS fit on the selected subset.
    pub raw: OlsFit,
    /// Re-weighted final fit.
    pub refined: OlsFit,
    /// Selection criterion of the winning subset: the incongruence index
    /// here, the trimmed RSS for the LTS baseline.
    pub criterion: f64,
    /// True when h or more observations lie exactly on a hyperplane and the
    /// returned fit coincides with it.
    pub exact_fit: bool,
    /// True when re-weighting kept fewer than p rows and the final fit fell
    /// back to the raw fit.
    pub reweight_fallback: bool,
    pub report: OutlyingnessReport,
}

/// Size of the active subset: `ceil((n+p+1)/2)` at `alpha = 0.5`, linearly
/// interpolated toward `n` as `alpha` approaches 1.
pub fn subset_size_h(n: usize, p: usize, alpha: f64) -> usize {
    let h_half = (n + p + 1).div_ceil(2);
    let h = (h_half as f64 + (alpha - 0.5) * 2.0 * (n - h_half) as f64).floor() as usize;
    h.clamp(h_half, n)
}

/// Target subset sizes of the growing stages: stage `l` of `stages` grows to
/// `p + 1 + ceil((h - p - 1) * l / stages)`, reaching exactly `h` at the end.
pub fn growth_schedule(p: usize, h: usize, stages: usize) -> Vec<usize> {
    (1..=stages)
        .map(|l| p + 1 + ((h - p - 1) * l).div_ceil(stages))
        .collect()
}

/// Coefficients of the hyperplane through exactly `p` points, each given as
/// a `(p-1)`-vector of predictors and a response.
///
/// Affinely degenerate point sets yield `Singular`; callers drawing points
/// at random are expected to resample.
pub fn exact_hyperplane(xs: &[&[f64]], ys: &[f64]) -> Result<Hyperplane> {
    let p = ys.len();
    if xs.len() != p || p < 2 {
        return Err(Error::InvalidInput("need exactly p points".into()));
    }
    let mut a = Vec::with_capacity(p * p);
    for x in xs {
        if x.len() != p - 1 {
            return Err(Error::InvalidInput("point dimension mismatch".into()));
        }
        a.push(1.0);
        a.extend_from_slice(x);
    }
    let theta = solve_linear(&Matrix::new(p, p, a)?, ys)?;
    Ok(Hyperplane::from_theta(&theta))
}

fn plane_through(data: &Dataset, idx: &[usize]) -> Result<Hyperplane> {
    let p = data.p();
    debug_assert_eq!(idx.len(), p);
    let mut a = Vec::with_capacity(p * p);
    let mut b = Vec::with_capacity(p);
    for &i in idx {
        a.push(1.0);
        a.extend_from_slice(data.xrow(i));
        b.push(data.response()[i]);
    }
    let theta = solve_linear(&Matrix::new(p, p, a)?, &b)?;
    Ok(Hyperplane::from_theta(&theta))
}

/// Absolute residual distances of every observation to `plane`.
pub fn residual_distances(plane: &Hyperplane, data: &Dataset) -> Vec<f64> {
    (0..data.n())
        .map(|i| plane.residual(data.xrow(i), data.response()[i]))
        .collect()
}

fn squared_residuals_into(plane: &Hyperplane, data: &Dataset, out: &mut [f64]) {
    for (i, slot) in out.iter_mut().enumerate() {
        let r = data.response()[i] - plane.predict(data.xrow(i));
        *slot = r * r;
    }
}

/// Indices of the `h` smallest values, ties at the boundary broken by the
/// smaller index; returned in ascending index order.
pub fn h_smallest(values: &[f64], h: usize) -> Vec<usize> {
    assert!(h <= values.len(), "h={h} exceeds length {}", values.len());
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.truncate(h);
    idx.sort_unstable();
    idx
}

fn mean_over(values: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64
}

/// Incongruence of `subset` along `plane`: the log-ratio of the subset's
/// mean squared residual to the mean over the h best-fitting observations.
///
/// Both averages below `exact_fit_tol` is taken as log(0/0) := 0; only the
/// denominator vanishing yields +inf (the subset is maximally incongruent
/// with an exact local fit).
pub fn incongruence(
    subset: &[usize],
    plane: &Hyperplane,
    data: &Dataset,
    h: usize,
    exact_fit_tol: f64,
) -> f64 {
    let mut sq = vec![0.0; data.n()];
    squared_residuals_into(plane, data, &mut sq);
    incongruence_from_sq(subset, &sq, h, exact_fit_tol)
}

fn incongruence_from_sq(subset: &[usize], sq: &[f64], h: usize, exact_fit_tol: f64) -> f64 {
    debug_assert!(!subset.is_empty());
    let num = mean_over(sq, subset);
    let best = h_smallest(sq, h);
    let den = mean_over(sq, &best);
    if num < exact_fit_tol && den < exact_fit_tol {
        0.0
    } else if den < exact_fit_tol {
        f64::INFINITY
    } else {
        (num / den).ln()
    }
}

/// Draws the next usable hyperplane through `p` points of `pool`.
///
/// Singular draws are resampled; `failures` counts consecutive rejections
/// (shared with the caller's own rejection reasons) and trips the
/// skip-subset error past the cap.
fn draw_plane(
    data: &Dataset,
    pool: &[usize],
    rng: &mut Rng,
    failures: &mut usize,
) -> Result<Hyperplane> {
    let p = data.p();
    loop {
        let picks = rng.sample_distinct(p, pool.len());
        let idx: Vec<usize> = picks.into_iter().map(|j| pool[j]).collect();
        match plane_through(data, &idx) {
            Ok(plane) => return Ok(plane),
            Err(_) => {
                *failures += 1;
                if *failures >= MAX_CONSECUTIVE_FAILURES {
                    return Err(Error::DegenerateData(1));
                }
            }
        }
    }
}

/// Incongruence index of `subset`: the average incongruence over `k` random
/// hyperplanes through p points drawn without replacement from the subset.
///
/// +inf sentinels propagate into the average; if every drawn plane fits
/// exactly (all-zero residuals) the index is 0. A subset on which no
/// hyperplane can be fitted after repeated resampling yields the
/// skip-subset error.
pub fn i_index(
    subset: &[usize],
    data: &Dataset,
    k: usize,
    rng: &mut Rng,
    exact_fit_tol: f64,
) -> Result<f64> {
    let h = subset.len();
    let mut sq = vec![0.0; data.n()];
    let mut failures = 0;
    let mut sum = 0.0;
    for _ in 0..k {
        let plane = draw_plane(data, subset, rng, &mut failures)?;
        failures = 0;
        squared_residuals_into(&plane, data, &mut sq);
        sum += incongruence_from_sq(subset, &sq, h, exact_fit_tol);
    }
    Ok(sum / k as f64)
}

/// Incongruence index averaged over every hyperplane through p in-subset
/// points (the full direction set rather than a random sample). Intended
/// for small problems; degenerate point tuples define no hyperplane and are
/// excluded from the average.
pub fn i_index_exhaustive(subset: &[usize], data: &Dataset, exact_fit_tol: f64) -> Result<f64> {
    let p = data.p();
    let h = subset.len();
    if h < p {
        return Err(Error::InvalidInput("subset smaller than p".into()));
    }
    let mut combo: Vec<usize> = (0..p).collect();
    let mut sq = vec![0.0; data.n()];
    let mut sum = 0.0;
    let mut count = 0usize;
    loop {
        let idx: Vec<usize> = combo.iter().map(|&j| subset[j]).collect();
        if let Ok(plane) = plane_through(data, &idx) {
            squared_residuals_into(&plane, data, &mut sq);
            sum += incongruence_from_sq(subset, &sq, h, exact_fit_tol);
            count += 1;
        }
        // next lexicographic combination of p out of h
        let mut i = p;
        loop {
            if i == 0 {
                return if count == 0 {
                    Err(Error::DegenerateData(1))
                } else {
                    Ok(sum / count as f64)
                };
            }
            i -= 1;
            if combo[i] != i + h - p {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..p {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// A grown subset, possibly flagged as an exact fit.
#[derive(Clone, Debug)]
pub struct Grown {
    /// Ascending index order; size h.
    pub indices: Vec<usize>,
    /// Set when h or more observations sat exactly on a drawn hyperplane;
    /// `indices` then holds h of those observations.
    pub exact_fit: bool,
}

/// Grows a (p+1)-subset to size `h` in `stages` stages. Every stage draws
/// `k` hyperplanes through points of the *current* subset, ranks all n
/// observations by the average normalized squared residual, and keeps the
/// scheduled number of best-ranked observations (ties by smaller index).
pub fn grow_subset(
    start: &[usize],
    data: &Dataset,
    h: usize,
    k: usize,
    stages: usize,
    rng: &mut Rng,
    exact_fit_tol: f64,
) -> Result<Grown> {
    let n = data.n();
    let p = data.p();
    if start.len() != p + 1 {
        return Err(Error::InvalidInput(format!(
            "starting subset must have p+1 = {} members",
            p + 1
        )));
    }
    let schedule = growth_schedule(p, h, stages);
    let tol_sq = exact_fit_tol * exact_fit_tol;

    let mut current = start.to_vec();
    let mut sq = vec![0.0; n];
    let mut ranks = vec![0.0; n];
    for &q in &schedule {
        ranks.iter_mut().for_each(|r| *r = 0.0);
        let mut drawn = 0;
        let mut failures = 0;
        while drawn < k {
            let plane = draw_plane(data, &current, rng, &mut failures)?;
            squared_residuals_into(&plane, data, &mut sq);

            let on_plane = sq.iter().filter(|&&v| v < tol_sq).count();
            if on_plane >= h {
                let mut exact: Vec<usize> =
                    (0..n).filter(|&i| sq[i] < tol_sq).collect();
                exact.sort_unstable_by(|&a, &b| sq[a].total_cmp(&sq[b]).then(a.cmp(&b)));
                exact.truncate(h);
                exact.sort_unstable();
                return Ok(Grown {
                    indices: exact,
                    exact_fit: true,
                });
            }

            let den = mean_over(&sq, &current);
            if den < exact_fit_tol {
                // plane interpolates the whole current subset but not h
                // points globally; unusable for the ratio, so redraw
                failures += 1;
                if failures >= MAX_CONSECUTIVE_FAILURES {
                    return Err(Error::DegenerateData(1));
                }
                continue;
            }
            failures = 0;
            for i in 0..n {
                ranks[i] += sq[i] / den;
            }
            drawn += 1;
        }
        current = h_smallest(&ranks, q);
    }
    debug_assert_eq!(current.len(), h);
    Ok(Grown {
        indices: current,
        exact_fit: false,
    })
}

/// One-step re-weighting outcome.
#[derive(Clone, Debug)]
pub struct Reweighted {
    pub fit: OlsFit,
    /// Indices kept by the scale rule (ascending).
    pub kept: Vec<usize>,
    /// True when fewer than p rows survived (or the kept design was
    /// degenerate) and `fit` is the raw fit unchanged.
    pub fallback: bool,
}

/// Refits OLS on the observations whose raw-fit residual, standardized by
/// the robust scale `median(r) / Phi^-1(0.75)`, is at most `cutoff`.
///
/// A vanishing scale (exact fit) keeps exactly the on-plane observations.
pub fn reweight(raw: &OlsFit, data: &Dataset, cutoff: f64, exact_fit_tol: f64) -> Reweighted {
    let plane = Hyperplane::from_theta(&raw.theta);
    let r = residual_distances(&plane, data);
    let scale = median(&r) / normal_quantile(0.75);

    let mask: Vec<bool> = if scale <= exact_fit_tol {
        r.iter().map(|&ri| ri <= exact_fit_tol).collect()
    } else {
        r.iter().map(|&ri| ri / scale <= cutoff).collect()
    };
    let kept: Vec<usize> = (0..data.n()).filter(|&i| mask[i]).collect();

    if kept.len() < data.p() {
        return Reweighted {
            fit: raw.clone(),
            kept,
            fallback: true,
        };
    }
    match ols_fit(data.predictors(), data.response(), Some(&mask)) {
        Ok(fit) => Reweighted {
            fit,
            kept,
            fallback: false,
        },
        Err(_) => Reweighted {
            fit: raw.clone(),
            kept,
            fallback: true,
        },
    }
}

/// Builds the per-observation diagnostics for a finished fit: standardized
/// residuals, the h-subset of smallest raw residuals, the good set under
/// the cutoff rule, and outlier flags.
pub fn outlyingness_report(
    fit: &OlsFit,
    data: &Dataset,
    h: usize,
    cutoff: f64,
    exact_fit_tol: f64,
) -> OutlyingnessReport {
    let plane = Hyperplane::from_theta(&fit.theta);
    let r = residual_distances(&plane, data);
    let sigma = fit.sigma2.sqrt();
    let standardized: Vec<f64> = r
        .iter()
        .map(|&ri| {
            if sigma > 0.0 {
                ri / sigma
            } else if ri <= exact_fit_tol {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let h_plus = h_smallest(&r, h);
    let good_set: Vec<usize> = (0..data.n())
        .filter(|&i| standardized[i] <= cutoff)
        .collect();
    let mut flags = vec![true; data.n()];
    for &i in &good_set {
        flags[i] = false;
    }
    OutlyingnessReport {
        standardized_residuals: standardized,
        h_plus,
        good_set,
        flags,
    }
}

enum Candidate {
    Exact(Vec<usize>),
    Scored { subset: Vec<usize>, index: f64 },
    Skipped,
}

fn evaluate_candidate(data: &Dataset, h: usize, cfg: &RcsConfig, m: usize) -> Candidate {
    let mut rng = Rng::substream(cfg.seed, m as u64);
    let start = rng.sample_distinct(data.p() + 1, data.n());
    match grow_subset(&start, data, h, cfg.k, cfg.l, &mut rng, cfg.exact_fit_tol) {
        Err(_) => Candidate::Skipped,
        Ok(grown) if grown.exact_fit => Candidate::Exact(grown.indices),
        Ok(grown) => match i_index(&grown.indices, data, cfg.k, &mut rng, cfg.exact_fit_tol) {
            Err(_) => Candidate::Skipped,
            Ok(index) => Candidate::Scored {
                subset: grown.indices,
                index,
            },
        },
    }
}

fn select_winner(candidates: Vec<Candidate>) -> Result<(Vec<usize>, f64, bool)> {
    let total = candidates.len();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for cand in candidates {
        match cand {
            Candidate::Exact(subset) => return Ok((subset, 0.0, true)),
            Candidate::Scored { subset, index } => {
                let better = best.as_ref().map_or(true, |(_, b)| index < *b);
                if better {
                    best = Some((subset, index));
                }
            }
            Candidate::Skipped => {}
        }
    }
    best.map(|(s, i)| (s, i, false))
        .ok_or(Error::DegenerateData(total))
}

fn build_result(
    data: &Dataset,
    cfg: &RcsConfig,
    h: usize,
    subset: Vec<usize>,
    criterion: f64,
    exact_fit: bool,
) -> Result<FitResult> {
    let mut mask = vec![false; data.n()];
    for &i in &subset {
        mask[i] = true;
    }
    let mut raw = ols_fit(data.predictors(), data.response(), Some(&mask))?;
    if exact_fit {
        raw.sigma2 = 0.0;
    }
    let rw = reweight(&raw, data, cfg.reweight_cutoff, cfg.exact_fit_tol);
    let report = outlyingness_report(
        &rw.fit,
        data,
        h,
        cfg.reweight_cutoff,
        cfg.exact_fit_tol,
    );
    Ok(FitResult {
        h_star: subset,
        raw,
        refined: rw.fit,
        criterion,
        exact_fit,
        reweight_fallback: rw.fallback,
        report,
    })
}

/// Runs the full subset search sequentially.
///
/// Identical `(data, cfg)` always produce a bit-identical result: every
/// candidate draws from its own seed-derived substream, an exact fit is
/// honored in candidate order, and index ties in the argmin go to the
/// earliest candidate.
pub fn fastrcs(data: &Dataset, cfg: &RcsConfig) -> Result<FitResult> {
    cfg.validate()?;
    let h = subset_size_h(data.n(), data.p(), cfg.alpha);
    let starts = cfg.resolved_starts(data.p());

    let mut candidates = Vec::with_capacity(starts);
    for m in 0..starts {
        let cand = evaluate_candidate(data, h, cfg, m);
        let exact = matches!(cand, Candidate::Exact(_));
        candidates.push(cand);
        if exact {
            break; // earlier candidates were not exact, so the winner is fixed
        }
    }
    let (subset, criterion, exact) = select_winner(candidates)?;
    build_result(data, cfg, h, subset, criterion, exact)
}

/// Same search with candidates evaluated on `workers` threads. The
/// reduction runs in candidate order, so the result is bit-identical to the
/// sequential path for any worker count.
#[cfg(feature = "parallel")]
pub fn fastrcs_with_workers(data: &Dataset, cfg: &RcsConfig, workers: usize) -> Result<FitResult> {
    if workers <= 1 {
        return fastrcs(data, cfg);
    }
    cfg.validate()?;
    let h = subset_size_h(data.n(), data.p(), cfg.alpha);
    let starts = cfg.resolved_starts(data.p());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let candidates: Vec<Candidate> = pool.install(|| {
        use rayon::prelude::*;
        (0..starts)
            .into_par_iter()
            .map(|m| evaluate_candidate(data, h, cfg, m))
            .collect()
    });
    let (subset, criterion, exact) = select_winner(candidates)?;
    build_result(data, cfg, h, subset, criterion, exact)
}
