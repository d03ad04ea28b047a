//! Regression data container and the elemental hyperplane type.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// A response vector paired with its design matrix (intercept not stored;
/// it is prepended by the fitting routines). `p` counts the intercept, so a
/// dataset with `k` predictor columns has `p = k + 1`.
#[derive(Clone, Debug)]
pub struct Dataset {
    x: Matrix,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<f64>) -> Result<Self> {
        let n = x.rows();
        let p = x.cols() + 1;
        if y.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} responses for {n} rows",
                y.len()
            )));
        }
        if x.cols() == 0 {
            return Err(Error::InvalidInput("need at least one predictor".into()));
        }
        if n <= p {
            return Err(Error::InvalidInput(format!(
                "need more observations than coefficients (n={n}, p={p})"
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("responses must be finite".into()));
        }
        Ok(Self { x, y })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?, y)
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    /// Model dimension including the intercept.
    pub fn p(&self) -> usize {
        self.x.cols() + 1
    }

    pub fn predictors(&self) -> &Matrix {
        &self.x
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }

    #[inline]
    pub fn xrow(&self, i: usize) -> &[f64] {
        self.x.row(i)
    }
}

/// The regression hyperplane `y = intercept + x' slopes`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hyperplane {
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

impl Hyperplane {
    pub fn from_theta(theta: &[f64]) -> Self {
        Self {
            intercept: theta[0],
            slopes: theta[1..].to_vec(),
        }
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut acc = self.intercept;
        for (s, v) in self.slopes.iter().zip(x) {
            acc += s * v;
        }
        acc
    }

    /// Absolute residual distance of the point `(x, y)` to the plane.
    #[inline]
    pub fn residual(&self, x: &[f64], y: f64) -> f64 {
        (y - self.predict(x)).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_small_samples() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(Dataset::new(x, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_non_finite_response() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        assert!(Dataset::new(x, vec![0.0, 1.0, f64::NAN, 3.0]).is_err());
    }

    #[test]
    fn plane_prediction_and_residual() {
        let plane = Hyperplane {
            intercept: 1.0,
            slopes: vec![2.0],
        };
        assert_eq!(plane.predict(&[2.0]), 5.0);
        assert_eq!(plane.residual(&[2.0], 0.0), 5.0);
        assert_eq!(plane.residual(&[3.0], 7.0), 0.0);
    }
}
