//! Adversarial contaminated-sample generator with ground truth.
//!
//! Clean rows follow the canonical model (standard normal design, zero
//! coefficients, unit noise). Contaminated rows are placed against it in one
//! of the two worst-case configurations for equivariant estimators:
//!
//! * `Shift` — outlier responses keep the clean noise variance, making the
//!   mixture components as indistinguishable as possible;
//! * `PointMass` — outliers concentrate near a subspace (design and response
//!   variance shrunk by 1e-4), maximizing the leverage cost of each miss.
//!
//! The outlier cluster is translated along the first design axis until its
//! closest member sits exactly at `d_x * sqrt(chisq_quantile(0.95, p-1))`
//! from the origin, and the response offset is chosen so the smallest
//! leverage-standardized vertical distance equals `nu` exactly.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::numkit::{chisq_quantile, normal_quantile, Matrix};
use crate::rng::Rng;

/// Spatial configuration of the contaminated rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contamination {
    Shift,
    PointMass,
}

impl Contamination {
    pub fn name(self) -> &'static str {
        match self {
            Contamination::Shift => "shift",
            Contamination::PointMass => "pointmass",
        }
    }
}

impl std::fmt::Display for Contamination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Contamination {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "shift" => Ok(Contamination::Shift),
            "pointmass" | "point-mass" | "point_mass" => Ok(Contamination::PointMass),
            other => Err(format!("unknown contamination configuration '{other}'")),
        }
    }
}

/// Parameters of one simulated sample.
#[derive(Clone, Debug, Serialize)]
pub struct ContaminationConfig {
    /// Model dimension including the intercept (so p-1 predictors).
    pub p: usize,
    /// Sample size; defaults to `25 * p`.
    pub n: Option<usize>,
    /// Contamination rate in `[0, 0.5)`; the sample holds `floor(eps * n)`
    /// outliers.
    pub epsilon: f64,
    pub configuration: Contamination,
    /// Design-space separation factor (2 = nearby, 8 = far away).
    pub d_x: f64,
    /// Leverage-standardized vertical distance of the nearest outlier.
    pub nu: f64,
    /// Clean fraction the downstream fit will assume; carried for
    /// bookkeeping, not used by the generator itself.
    pub alpha: f64,
    pub seed: u64,
}

impl ContaminationConfig {
    pub fn sample_size(&self) -> usize {
        self.n.unwrap_or(25 * self.p)
    }
}

/// A simulated sample plus its ground truth.
#[derive(Clone, Debug)]
pub struct GeneratedSample {
    pub data: Dataset,
    /// Indices of the contaminated rows (ascending).
    pub outlier_indices: Vec<usize>,
    /// Coefficients of the clean model (all zeros under the canonical form).
    pub true_theta: Vec<f64>,
    /// Noise variance of the clean model (1 under the canonical form).
    pub sigma2: f64,
}

/// Half the asymptotic width of the least-squares prediction interval at
/// `x`, under the known unit design covariance and unit noise of the clean
/// model: `z_0.975 * sqrt(1 + 1/n + x'x/(n-1))`.
pub fn leverage_width(x: &[f64], n: usize) -> f64 {
    let xtx: f64 = x.iter().map(|v| v * v).sum();
    normal_quantile(0.975) * (1.0 + 1.0 / n as f64 + xtx / (n - 1) as f64).sqrt()
}

/// Number of random (p+1)-subsets needed so that at least one is fully
/// uncontaminated with the given confidence (default 0.99), under the
/// working contamination bound `eps0 = 4(1 - alpha)/5`.
pub fn mp_starts_with_confidence(p: usize, alpha: f64, confidence: f64) -> usize {
    assert!(p >= 1, "p must be at least 1");
    assert!((0.5..1.0).contains(&alpha), "alpha must lie in [0.5, 1)");
    assert!(confidence > 0.0 && confidence < 1.0);
    let eps0 = 4.0 * (1.0 - alpha) / 5.0;
    let clean_start = (1.0 - eps0).powi(p as i32 + 1);
    if clean_start >= 1.0 {
        return 1;
    }
    let m = ((1.0 - confidence).ln() / (1.0 - clean_start).ln()).ceil();
    (m as usize).max(1)
}

/// [`mp_starts_with_confidence`] at the default 99% confidence.
pub fn mp_starts(p: usize, alpha: f64) -> usize {
    mp_starts_with_confidence(p, alpha, 0.99)
}

/// Generates one contaminated sample. Deterministic in the configuration
/// (including the seed); clean rows come first, outliers last.
pub fn generate(cfg: &ContaminationConfig) -> GeneratedSample {
    assert!(cfg.p >= 2, "p must be at least 2");
    assert!(
        (0.0..0.5).contains(&cfg.epsilon),
        "epsilon must lie in [0, 0.5)"
    );
    assert!(cfg.nu >= 0.0, "nu must be nonnegative");
    assert!(cfg.d_x >= 0.0, "d_x must be nonnegative");
    let n = cfg.sample_size();
    let p = cfg.p;
    let dim = p - 1;
    assert!(n > p, "sample size must exceed p");

    let mut rng = Rng::seed_from_u64(cfg.seed);
    let n_out = (cfg.epsilon * n as f64).floor() as usize;
    let n_clean = n - n_out;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut y: Vec<f64> = Vec::with_capacity(n);
    for _ in 0..n_clean {
        rows.push((0..dim).map(|_| rng.next_normal()).collect());
        y.push(rng.next_normal());
    }

    if n_out > 0 {
        let (x_sd, y_sd) = match cfg.configuration {
            Contamination::Shift => (1.0, 1.0),
            Contamination::PointMass => (1e-2, 1e-2),
        };
        let mut cluster: Vec<Vec<f64>> = (0..n_out)
            .map(|_| (0..dim).map(|_| x_sd * rng.next_normal()).collect())
            .collect();

        // translate along the first axis until min ||x|| hits the target
        let target = cfg.d_x * chisq_quantile(0.95, dim as u32).sqrt();
        let mut shift = f64::NEG_INFINITY;
        for row in &cluster {
            let rest: f64 = row[1..].iter().map(|v| v * v).sum();
            if rest <= target * target {
                shift = shift.max((target * target - rest).sqrt() - row[0]);
            }
        }
        if !shift.is_finite() {
            // every cluster member clears the target radius on the other
            // coordinates alone; equality is unreachable by translation, so
            // park the nearest member at its minimum attainable distance
            let nearest = cluster
                .iter()
                .map(|row| row[1..].iter().map(|v| v * v).sum::<f64>())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i)
                .unwrap();
            shift = -cluster[nearest][0];
        }
        for row in &mut cluster {
            row[0] += shift;
        }

        // vertical placement: smallest |y| / W(x) equals nu exactly
        let noise: Vec<f64> = (0..n_out).map(|_| y_sd * rng.next_normal()).collect();
        let offset = cluster
            .iter()
            .zip(&noise)
            .map(|(row, eta)| cfg.nu * leverage_width(row, n) - eta)
            .fold(f64::NEG_INFINITY, f64::max);
        for (row, eta) in cluster.into_iter().zip(noise) {
            rows.push(row);
            y.push(offset + eta);
        }
    }

    let data = Dataset::new(
        Matrix::from_rows(&rows).expect("generated rows are rectangular and finite"),
        y,
    )
    .expect("generated sample satisfies the model preconditions");
    GeneratedSample {
        data,
        outlier_indices: (n_clean..n).collect(),
        true_theta: vec![0.0; p],
        sigma2: 1.0,
    }
}
