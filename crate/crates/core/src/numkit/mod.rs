//! Small dense numerical kernel: linear solves with partial pivoting,
//! weighted OLS through the normal equations, order statistics, and the two
//! quantile functions the estimators need.
//!
//! Everything here is sized for regression problems with at most a few dozen
//! coefficients; no attempt is made at large-scale or sparse work.

mod quantile;

pub use quantile::{chisq_cdf, chisq_quantile, normal_cdf, normal_quantile};

use crate::error::{Error, Result};

/// Relative pivot threshold below which an elimination step declares the
/// system singular.
const PIVOT_RTOL: f64 = 1e-12;

/// Weighted residual sums of squares at or below this are treated as an
/// exact fit (`sigma2 = 0`).
const RSS_EXACT_TOL: f64 = 1e-20;

/// Dense row-major matrix of finite values.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::InvalidInput(format!(
                "matrix shape {rows}x{cols} does not match {} entries",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Solves the square system `A x = b` by Gaussian elimination with partial
/// pivoting. Declares `Singular` when a pivot falls below
/// `1e-12 * max |a_ij|` of the input matrix, in which case callers holding a
/// random point subset should resample it.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let p = a.rows();
    if a.cols() != p {
        return Err(Error::InvalidInput("solve_linear needs a square matrix".into()));
    }
    if b.len() != p {
        return Err(Error::InvalidInput("right-hand side length mismatch".into()));
    }
    let max_entry = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = PIVOT_RTOL * max_entry;

    let mut m = a.data.clone();
    let mut x = b.to_vec();
    for col in 0..p {
        let mut pivot_row = col;
        let mut pivot_val = m[col * p + col].abs();
        for r in col + 1..p {
            let v = m[r * p + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= threshold {
            return Err(Error::Singular);
        }
        if pivot_row != col {
            for j in 0..p {
                m.swap(col * p + j, pivot_row * p + j);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[col * p + col];
        for r in col + 1..p {
            let factor = m[r * p + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[r * p + col] = 0.0;
            for j in col + 1..p {
                m[r * p + j] -= factor * m[col * p + j];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..p).rev() {
        let mut acc = x[col];
        for j in col + 1..p {
            acc -= m[col * p + j] * x[j];
        }
        x[col] = acc / m[col * p + col];
    }
    Ok(x)
}

/// An intercept-first coefficient vector plus its residual variance.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct OlsFit {
    /// `[intercept, slope_1, ..., slope_{p-1}]`.
    pub theta: Vec<f64>,
    /// Weighted RSS / (m - p) with `m` the number of weighted rows;
    /// zero when the fit interpolates (RSS below 1e-20 or `m == p`).
    pub sigma2: f64,
}

/// Weighted least squares of `y` on `[1 | x]` via the normal equations.
///
/// `weights`, when given, is a 0/1 row mask. The normal-equation route is
/// adequate here because the model dimension stays small (p of a few dozen
/// at most); rank-deficient weighted designs surface as `Singular`.
pub fn ols_fit(x: &Matrix, y: &[f64], weights: Option<&[bool]>) -> Result<OlsFit> {
    let n = x.rows();
    let p = x.cols() + 1;
    if y.len() != n {
        return Err(Error::InvalidInput("response length mismatch".into()));
    }
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::InvalidInput("weight length mismatch".into()));
        }
    }
    let included = |i: usize| weights.map_or(true, |w| w[i]);
    let m = (0..n).filter(|&i| included(i)).count();
    if m < p {
        return Err(Error::Singular);
    }

    // X'X and X'y with the intercept column prepended.
    let mut xtx = vec![0.0; p * p];
    let mut xty = vec![0.0; p];
    let mut row = vec![0.0; p];
    for i in 0..n {
        if !included(i) {
            continue;
        }
        row[0] = 1.0;
        row[1..].copy_from_slice(x.row(i));
        for a in 0..p {
            xty[a] += row[a] * y[i];
            for b in a..p {
                xtx[a * p + b] += row[a] * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            xtx[a * p + b] = xtx[b * p + a];
        }
    }
    let theta = solve_linear(&Matrix::new(p, p, xtx)?, &xty)?;

    let mut rss = 0.0;
    for i in 0..n {
        if !included(i) {
            continue;
        }
        let mut pred = theta[0];
        for (j, &xj) in x.row(i).iter().enumerate() {
            pred += theta[j + 1] * xj;
        }
        let r = y[i] - pred;
        rss += r * r;
    }
    let sigma2 = if rss <= RSS_EXACT_TOL || m == p {
        0.0
    } else {
        rss / (m - p) as f64
    };
    Ok(OlsFit { theta, sigma2 })
}

/// k-th smallest value of `v` (1-based rank). Well defined under ties.
///
/// Panics when `k` is out of `1..=v.len()`.
pub fn order_statistic(v: &[f64], k: usize) -> f64 {
    assert!(
        k >= 1 && k <= v.len(),
        "rank {k} out of range for length {}",
        v.len()
    );
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted[k - 1]
}

/// Sample median (midpoint of the two central order statistics for even n).
pub fn median(v: &[f64]) -> f64 {
    assert!(!v.is_empty(), "median of an empty slice");
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn solve_diagonal_system() {
        let a = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let x = solve_linear(&a, &[2.0, 8.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn solve_rank_deficient_is_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(solve_linear(&a, &[1.0, 2.0]), Err(Error::Singular));
    }

    #[test]
    fn solve_random_system_residual_small() {
        // residual check: substitute the solution back into the system
        let mut rng = Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = 5;
            let data: Vec<f64> = (0..p * p).map(|_| rng.next_normal()).collect();
            let b: Vec<f64> = (0..p).map(|_| rng.next_normal()).collect();
            let a = Matrix::new(p, p, data).unwrap();
            let x = solve_linear(&a, &b).unwrap();
            let binf = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..p {
                let ax: f64 = (0..p).map(|j| a.get(i, j) * x[j]).sum();
                assert!((ax - b[i]).abs() <= 1e-8 * (1.0 + binf));
            }
        }
    }

    #[test]
    fn ols_exact_line() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let fit = ols_fit(&x, &[1.0, 3.0, 5.0], None).unwrap();
        assert!((fit.theta[0] - 1.0).abs() < 1e-12);
        assert!((fit.theta[1] - 2.0).abs() < 1e-12);
        assert_eq!(fit.sigma2, 0.0);
    }

    #[test]
    fn ols_saturated_weighted_fit_interpolates() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = [5.0, -1.0, 100.0, 200.0];
        let w = [true, false, true, false];
        let fit = ols_fit(&x, &y, Some(&w)).unwrap();
        assert_eq!(fit.sigma2, 0.0);
        // interpolates the two weighted points
        assert!((fit.theta[0] - 5.0).abs() < 1e-9);
        assert!((fit.theta[0] + 2.0 * fit.theta[1] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn ols_too_few_rows_is_singular() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let w = [true, false, false];
        assert_eq!(ols_fit(&x, &[1.0, 2.0, 3.0], Some(&w)), Err(Error::Singular));
    }

    /// Independent normal-equations oracle: explicit 2x2-block-free
    /// accumulation with centered slopes, solved by Cramer-style inversion
    /// through a fresh Gaussian elimination written out longhand.
    fn ols_oracle(x: &Matrix, y: &[f64]) -> Vec<f64> {
        let n = x.rows();
        let p = x.cols() + 1;
        let mut g = vec![vec![0.0; p + 1]; p];
        for i in 0..n {
            let mut row = vec![1.0];
            row.extend_from_slice(x.row(i));
            for a in 0..p {
                for b in 0..p {
                    g[a][b] += row[a] * row[b];
                }
                g[a][p] += row[a] * y[i];
            }
        }
        // naive elimination without pivoting (random designs are safe)
        for c in 0..p {
            let piv = g[c][c];
            for j in c..=p {
                g[c][j] /= piv;
            }
            for r in 0..p {
                if r != c {
                    let f = g[r][c];
                    for j in c..=p {
                        g[r][j] -= f * g[c][j];
                    }
                }
            }
        }
        (0..p).map(|r| g[r][p]).collect()
    }

    #[test]
    fn ols_matches_normal_equation_oracle() {
        let mut rng = Rng::seed_from_u64(11);
        let n = 50;
        let cols = 2;
        let data: Vec<f64> = (0..n * cols).map(|_| rng.next_normal()).collect();
        let x = Matrix::new(n, cols, data).unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        let fit = ols_fit(&x, &y, None).unwrap();
        let oracle = ols_oracle(&x, &y);
        for (a, b) in fit.theta.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn ols_residuals_orthogonal_to_design() {
        let mut rng = Rng::seed_from_u64(13);
        let n = 60;
        let cols = 3;
        let data: Vec<f64> = (0..n * cols).map(|_| rng.next_normal()).collect();
        let x = Matrix::new(n, cols, data).unwrap();
        let y: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_normal()).collect();
        let fit = ols_fit(&x, &y, None).unwrap();
        let resid: Vec<f64> = (0..n)
            .map(|i| {
                let mut pred = fit.theta[0];
                for (j, &xj) in x.row(i).iter().enumerate() {
                    pred += fit.theta[j + 1] * xj;
                }
                y[i] - pred
            })
            .collect();
        let dot0: f64 = resid.iter().sum();
        assert!(dot0.abs() < 1e-6, "intercept column: {dot0}");
        for j in 0..cols {
            let dot: f64 = (0..n).map(|i| resid[i] * x.get(i, j)).sum();
            assert!(dot.abs() < 1e-6, "column {j}: {dot}");
        }
    }

    #[test]
    fn order_statistic_basics() {
        assert_eq!(order_statistic(&[4.0, 1.0, 9.0, 0.0, 16.0], 3), 4.0);
        assert_eq!(order_statistic(&[1.0, 1.0, 1.0], 2), 1.0);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn order_statistic_rank_out_of_range() {
        order_statistic(&[1.0, 2.0], 3);
    }

    #[test]
    fn order_statistic_matches_full_sort_oracle() {
        let mut rng = Rng::seed_from_u64(17);
        for _ in 0..50 {
            let v: Vec<f64> = (0..101).map(|_| rng.next_normal()).collect();
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let k = 1 + rng.below(101);
            assert_eq!(order_statistic(&v, k), sorted[k - 1]);
            assert_eq!(order_statistic(&v, 51), sorted[50]);
        }
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
