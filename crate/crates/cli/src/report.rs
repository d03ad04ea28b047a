//! Per-fit report serialization (JSON and CSV).

use serde::Serialize;

use fastrcs::FitResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub algorithm: String,
    pub n: usize,
    pub p: usize,
    pub h: usize,
    pub alpha: f64,
    pub seed: u64,
    pub coefficients: Vec<f64>,
    pub sigma_hat: f64,
    /// Incongruence index of the winning subset; absent for the baseline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_index: Option<f64>,
    pub exact_fit: bool,
    pub reweight_fallback: bool,
    pub flagged: usize,
    pub rows: Vec<RowReport>,
}

#[derive(Serialize)]
pub struct RowReport {
    pub index: usize,
    /// `None` encodes an infinite standardized residual (off-plane point
    /// under an exact fit); JSON renders it as null, CSV as `inf`.
    pub standardized_residual: Option<f64>,
    pub in_h_plus: bool,
    pub flagged: bool,
}

impl FitReport {
    pub fn new(
        algorithm: &str,
        n: usize,
        h: usize,
        alpha: f64,
        seed: u64,
        result: &FitResult,
    ) -> Self {
        let rows: Vec<RowReport> = (0..n)
            .map(|i| {
                let std = result.report.standardized_residuals[i];
                RowReport {
                    index: i,
                    standardized_residual: std.is_finite().then_some(std),
                    in_h_plus: result.report.h_plus.binary_search(&i).is_ok(),
                    flagged: result.report.flags[i],
                }
            })
            .collect();
        FitReport {
            schema_version: SCHEMA_VERSION,
            algorithm: algorithm.to_string(),
            n,
            p: result.refined.theta.len(),
            h,
            alpha,
            seed,
            coefficients: result.refined.theta.clone(),
            sigma_hat: result.refined.sigma2.sqrt(),
            i_index: (algorithm == "rcs").then_some(result.criterion),
            exact_fit: result.exact_fit,
            reweight_fallback: result.reweight_fallback,
            flagged: result.report.flags.iter().filter(|&&f| f).count(),
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("schema_version,algorithm,index,standardized_residual,in_h_plus,flagged\n");
        for row in &self.rows {
            let std = match row.standardized_residual {
                Some(v) => crate::csvio::format_float(v),
                None => "inf".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.schema_version, self.algorithm, row.index, std, row.in_h_plus, row.flagged
            ));
        }
        out
    }

    /// The one-line summary the fit command prints.
    pub fn summary_line(&self) -> String {
        format!(
            "n={} p={} h={} flagged={} sigma_hat={:.6}{}",
            self.n,
            self.p,
            self.h,
            self.flagged,
            self.sigma_hat,
            if self.exact_fit { " exact_fit" } else { "" }
        )
    }
}
