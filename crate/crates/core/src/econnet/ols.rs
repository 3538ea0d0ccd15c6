//! Shared least-squares machinery with t-test p-values.

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EconError;

pub(crate) struct LsFit {
    pub coefs: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// two-sided p-values per coefficient
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// residual variance with degrees-of-freedom divisor
    pub sigma2: f64,
    pub dof: usize,
}

impl LsFit {
    pub fn t_stat(&self, k: usize) -> f64 {
        self.coefs[k] / self.stderrs[k]
    }

    /// One-sided p-value for H1: coefficient k > 0.
    pub fn p_positive(&self, k: usize) -> f64 {
        let stat = self.t_stat(k);
        if !stat.is_finite() {
            return if self.coefs[k] > 0.0 { 0.0 } else { 1.0 };
        }
        let t = StudentsT::new(0.0, 1.0, self.dof as f64).unwrap();
        1.0 - t.cdf(stat)
    }
}

/// Ordinary least squares: `columns` are the design-matrix columns (the
/// caller supplies an intercept column if one is wanted).
pub(crate) fn ols(y: &[f64], columns: &[Vec<f64>]) -> Result<LsFit, EconError> {
    let w = vec![1.0; y.len()];
    wls(y, columns, &w)
}

/// Weighted least squares with per-observation weights.
pub(crate) fn wls(y: &[f64], columns: &[Vec<f64>], weights: &[f64]) -> Result<LsFit, EconError> {
    let t_len = y.len();
    let k = columns.len();
    for c in columns {
        if c.len() != t_len {
            return Err(EconError::LengthMismatch {
                expected: t_len,
                actual: c.len(),
            });
        }
    }
    if weights.len() != t_len {
        return Err(EconError::LengthMismatch {
            expected: t_len,
            actual: weights.len(),
        });
    }
    if t_len < k + 2 {
        return Err(EconError::TooShort {
            required: k + 2,
            actual: t_len,
        });
    }

    // normal equations X'WX b = X'Wy
    let mut xtx = nalgebra::DMatrix::zeros(k, k);
    let mut xty = nalgebra::DVector::zeros(k);
    for a in 0..k {
        for b in a..k {
            let s: f64 = (0..t_len)
                .map(|t| weights[t] * columns[a][t] * columns[b][t])
                .sum();
            xtx[(a, b)] = s;
            xtx[(b, a)] = s;
        }
        xty[a] = (0..t_len).map(|t| weights[t] * columns[a][t] * y[t]).sum();
    }
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or(EconError::CollinearRegressors)?;
    // rounding can let an exactly singular X'X through the factorization;
    // a collapsed Cholesky pivot is the numerical signature of collinearity
    let diag = chol.l().diagonal();
    let max_pivot = diag.iter().fold(0.0_f64, |m, &d| m.max(d));
    if diag.iter().any(|&d| !(d > 1e-7 * max_pivot)) {
        return Err(EconError::CollinearRegressors);
    }
    let coefs_v = chol.solve(&xty);
    let inv = chol.inverse();

    let residuals: Vec<f64> = (0..t_len)
        .map(|t| y[t] - (0..k).map(|a| coefs_v[a] * columns[a][t]).sum::<f64>())
        .collect();
    let dof = t_len - k;
    let sigma2 = (0..t_len)
        .map(|t| weights[t] * residuals[t] * residuals[t])
        .sum::<f64>()
        / dof as f64;

    let dist = StudentsT::new(0.0, 1.0, dof as f64).unwrap();
    let mut coefs = Vec::with_capacity(k);
    let mut stderrs = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for a in 0..k {
        let se = (sigma2 * inv[(a, a)]).sqrt();
        let t_stat = coefs_v[a] / se;
        coefs.push(coefs_v[a]);
        stderrs.push(se);
        // exact fits give se = 0: the coefficient is then either exactly
        // zero (p = 1) or infinitely significant (p = 0)
        let p = if t_stat.is_finite() {
            2.0 * (1.0 - dist.cdf(t_stat.abs()))
        } else if coefs_v[a] == 0.0 {
            1.0
        } else {
            0.0
        };
        p_values.push(p);
    }
    Ok(LsFit {
        coefs,
        stderrs,
        p_values,
        residuals,
        sigma2,
        dof,
    })
}
