//! Evaluation measures for the simulation harness: coefficient bias,
//! outlier misclassification, and per-cell curve summaries.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::simgen::Contamination;

/// One evaluated replication of one simulation cell.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub algorithm: String,
    pub configuration: Contamination,
    pub p: usize,
    pub epsilon: f64,
    pub d_x: f64,
    pub alpha: f64,
    pub nu: f64,
    pub replication: usize,
    pub bias: f64,
    pub mis_rate: f64,
}

/// Median and 75th percentile of bias and misclassification over the
/// replications of one cell.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub configuration: Contamination,
    pub p: usize,
    pub epsilon: f64,
    pub d_x: f64,
    pub alpha: f64,
    pub nu: f64,
    pub replications: usize,
    pub median_bias: f64,
    pub p75_bias: f64,
    pub median_mis_rate: f64,
    pub p75_mis_rate: f64,
}

/// Euclidean norm of the fitted coefficient vector, intercept included.
///
/// Equals the worst-case-standardized coefficient bias under the canonical
/// generation (zero true coefficients, unit design covariance).
pub fn bias(theta_hat: &[f64]) -> f64 {
    theta_hat.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Fraction of true outliers admitted into the selected h-subset; 0 by
/// convention when there are no true outliers. `outlier_indices` must be
/// sorted ascending (as the generator produces them).
pub fn mis_rate(outlier_indices: &[usize], h_plus: &[usize]) -> f64 {
    if outlier_indices.is_empty() {
        return 0.0;
    }
    let hits = h_plus
        .iter()
        .filter(|i| outlier_indices.binary_search(i).is_ok())
        .count();
    hits as f64 / outlier_indices.len() as f64
}

/// Lower-interpolation percentile: the `ceil(q * n)`-th smallest value.
pub fn percentile_lower(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty slice");
    assert!((0.0..=1.0).contains(&q));
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct GroupKey {
    algorithm: String,
    configuration: &'static str,
    p: usize,
    epsilon: u64,
    d_x: u64,
    alpha: u64,
    nu: u64,
}

impl GroupKey {
    fn of(point: &CurvePoint) -> Self {
        Self {
            algorithm: point.algorithm.clone(),
            configuration: point.configuration.name(),
            p: point.p,
            epsilon: point.epsilon.to_bits(),
            d_x: point.d_x.to_bits(),
            alpha: point.alpha.to_bits(),
            nu: point.nu.to_bits(),
        }
    }
}

/// Groups points by (algorithm, configuration, p, epsilon, d_x, alpha, nu)
/// and reports the median and 75th percentile of bias and mis-rate per
/// group. Output order follows the group key; the result is invariant under
/// permutation of the replications.
pub fn summarize(points: &[CurvePoint]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<GroupKey, Vec<&CurvePoint>> = BTreeMap::new();
    for point in points {
        groups.entry(GroupKey::of(point)).or_default().push(point);
    }
    groups
        .into_values()
        .map(|members| {
            let biases: Vec<f64> = members.iter().map(|m| m.bias).collect();
            let rates: Vec<f64> = members.iter().map(|m| m.mis_rate).collect();
            let first = members[0];
            SummaryRow {
                algorithm: first.algorithm.clone(),
                configuration: first.configuration,
                p: first.p,
                epsilon: first.epsilon,
                d_x: first.d_x,
                alpha: first.alpha,
                nu: first.nu,
                replications: members.len(),
                median_bias: percentile_lower(&biases, 0.5),
                p75_bias: percentile_lower(&biases, 0.75),
                median_mis_rate: percentile_lower(&rates, 0.5),
                p75_mis_rate: percentile_lower(&rates, 0.75),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn bias_is_the_euclidean_norm() {
        assert_eq!(bias(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(bias(&[3.0, 4.0, 0.0, 0.0]), 5.0);
        let mut rng = Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v: Vec<f64> = (0..6).map(|_| rng.next_normal()).collect();
            let direct = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((bias(&v) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn mis_rate_counts_admitted_outliers() {
        assert_eq!(mis_rate(&[5, 6, 7], &[0, 1, 2, 3]), 0.0);
        let outliers: Vec<usize> = (70..100).collect();
        let h_plus: Vec<usize> = (40..100).collect();
        assert_eq!(mis_rate(&outliers, &h_plus), 1.0);
        assert_eq!(mis_rate(&[], &[0, 1]), 0.0);
        // 19 of 24 admitted
        let outliers: Vec<usize> = (35..59).collect();
        let h_plus: Vec<usize> = (0..15).chain(35..54).collect();
        assert!((mis_rate(&outliers, &h_plus) - 19.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn percentile_uses_lower_interpolation() {
        let one = [7.25];
        assert_eq!(percentile_lower(&one, 0.5), 7.25);
        assert_eq!(percentile_lower(&one, 0.75), 7.25);
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile_lower(&v, 0.5), 50.0);
        assert_eq!(percentile_lower(&v, 0.75), 75.0);
    }

    #[test]
    fn percentile_matches_sort_oracle() {
        let mut rng = Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = 1 + rng.below(40);
            let v: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for &q in &[0.25, 0.5, 0.75, 0.9] {
                let rank = ((q * n as f64).ceil() as usize).max(1);
                assert_eq!(percentile_lower(&v, q), sorted[rank - 1]);
            }
        }
    }

    fn point(algorithm: &str, nu: f64, replication: usize, bias: f64, mis: f64) -> CurvePoint {
        CurvePoint {
            algorithm: algorithm.into(),
            configuration: Contamination::PointMass,
            p: 4,
            epsilon: 0.3,
            d_x: 8.0,
            alpha: 0.5,
            nu,
            replication,
            bias,
            mis_rate: mis,
        }
    }

    #[test]
    fn summarize_groups_and_is_permutation_invariant() {
        let mut points = Vec::new();
        for rep in 0..10 {
            points.push(point("rcs", 1.0, rep, rep as f64, 0.0));
            points.push(point("lts", 1.0, rep, 2.0 * rep as f64, 1.0));
        }
        let forward = summarize(&points);
        points.reverse();
        let backward = summarize(&points);
        assert_eq!(forward.len(), 2);
        for (a, b) in forward.iter().zip(&backward) {
            assert_eq!(a.algorithm, b.algorithm);
            assert_eq!(a.median_bias, b.median_bias);
            assert_eq!(a.p75_bias, b.p75_bias);
        }
        // lower interpolation on 0..9: median is the 5th smallest (= 4)
        let rcs = forward.iter().find(|r| r.algorithm == "rcs").unwrap();
        assert_eq!(rcs.median_bias, 4.0);
        assert_eq!(rcs.p75_bias, 7.0);
        assert_eq!(rcs.replications, 10);
    }
}
