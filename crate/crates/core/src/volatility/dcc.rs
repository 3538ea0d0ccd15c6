use ndarray::Array2;

use crate::panel::ReturnsPanel;

use super::garch::{degarch, garch_fit, GarchFit, GarchSpec};
use super::neldermead::{nelder_mead, NmOptions};
use super::VolatilityError;

/// Desk-scale asset cap for the two-step estimator.
pub const DCC_MAX_ASSETS: usize = 100;

/// Dynamics sums at or above this value are treated as a boundary solution.
const BOUNDARY: f64 = 0.998;

/// Logistic ceiling on a + b.
const AB_CEILING: f64 = 0.999;

#[derive(Debug, Clone)]
pub struct DccFit {
    /// univariate fits, one per asset in panel order
    pub fits: Vec<GarchFit>,
    pub a: f64,
    pub b: f64,
    /// unconditional correlation of the volatility-normalized returns
    pub qbar: Array2<f64>,
    /// conditional correlation matrix per observation
    pub r_path: Vec<Array2<f64>>,
    /// correlation-stage log likelihood at the optimum
    pub loglik: f64,
    pub converged: bool,
}

impl DccFit {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a,
            "b": self.b,
            "loglik": self.loglik,
            "converged": self.converged,
            "univariate": self.fits.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn sample_correlation(z: &Array2<f64>) -> Array2<f64> {
    let (n, t_len) = z.dim();
    let means: Vec<f64> = (0..n).map(|i| z.row(i).sum() / t_len as f64).collect();
    let mut cov = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for t in 0..t_len {
                s += (z[[i, t]] - means[i]) * (z[[j, t]] - means[j]);
            }
            cov[[i, j]] = s / (t_len - 1) as f64;
            cov[[j, i]] = cov[[i, j]];
        }
    }
    let sd: Vec<f64> = (0..n).map(|i| cov[[i, i]].sqrt()).collect();
    let mut corr = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            corr[[i, j]] = if i == j { 1.0 } else { cov[[i, j]] / (sd[i] * sd[j]) };
        }
    }
    corr
}

/// Mean-reverting proxy recursion Q_t = (1-a-b) Qbar + a z z' + b Q_{t-1},
/// normalized to a correlation matrix each step. Returns the Gaussian
/// correlation-stage log likelihood and the R_t path.
fn correlation_path(
    z: &Array2<f64>,
    qbar: &Array2<f64>,
    a: f64,
    b: f64,
) -> Option<(f64, Vec<Array2<f64>>)> {
    let (n, t_len) = z.dim();
    let mut q = qbar.clone();
    let mut loglik = 0.0;
    let mut r_path = Vec::with_capacity(t_len);
    for t in 0..t_len {
        if t > 0 {
            let mut next = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    next[[i, j]] = (1.0 - a - b) * qbar[[i, j]]
                        + a * z[[i, t - 1]] * z[[j, t - 1]]
                        + b * q[[i, j]];
                }
            }
            q = next;
        }
        let mut r = Array2::zeros((n, n));
        for i in 0..n {
            r[[i, i]] = 1.0;
            for j in i + 1..n {
                let v = q[[i, j]] / (q[[i, i]] * q[[j, j]]).sqrt();
                r[[i, j]] = v;
                r[[j, i]] = v;
            }
        }
        let rm = nalgebra::DMatrix::from_fn(n, n, |i, j| r[[i, j]]);
        let chol = rm.cholesky()?;
        let zt = nalgebra::DVector::from_fn(n, |i, _| z[[i, t]]);
        let solved = chol.solve(&zt);
        let log_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        loglik += -0.5 * (log_det + zt.dot(&solved) - zt.dot(&zt));
        r_path.push(r);
    }
    Some((loglik, r_path))
}

/// Two-step conditional-correlation estimator: a univariate fit per asset,
/// then scalar (a, b) dynamics on the volatility-normalized returns with
/// correlation targeting.
pub fn dcc_fit(panel: &ReturnsPanel) -> Result<DccFit, VolatilityError> {
    let (n, t_len) = panel.returns.dim();
    if n > DCC_MAX_ASSETS {
        return Err(VolatilityError::TooManyAssets {
            actual: n,
            cap: DCC_MAX_ASSETS,
        });
    }
    if n == 0 {
        return Err(VolatilityError::DimensionMismatch {
            detail: "panel has no assets".into(),
        });
    }
    let spec = GarchSpec::new(1, 1)?;
    let mut fits = Vec::with_capacity(n);
    let mut z = Array2::zeros((n, t_len));
    for i in 0..n {
        let row: Vec<f64> = panel.returns.row(i).to_vec();
        let fit = garch_fit(&row, spec)?;
        let filtered = degarch(&row, &fit)?;
        for t in 0..t_len {
            z[[i, t]] = filtered[t];
        }
        fits.push(fit);
    }
    let qbar = sample_correlation(&z);

    // theta -> (a, b) with a, b >= 0 and a + b below the ceiling
    let unpack = |theta: &[f64]| -> (f64, f64) {
        let denom = 1.0 + theta[0].exp() + theta[1].exp();
        (
            AB_CEILING * theta[0].exp() / denom,
            AB_CEILING * theta[1].exp() / denom,
        )
    };
    let objective = |theta: &[f64]| -> f64 {
        let (a, b) = unpack(theta);
        match correlation_path(&z, &qbar, a, b) {
            Some((ll, _)) => -ll,
            None => f64::INFINITY,
        }
    };
    // start near (a, b) = (0.05, 0.90)
    let theta0 = vec![(0.05_f64 / 0.049).ln(), (0.90_f64 / 0.049).ln()];
    let result = nelder_mead(objective, &theta0, &NmOptions::default());
    let (a, b) = unpack(&result.x);
    let (loglik, r_path) = correlation_path(&z, &qbar, a, b).ok_or(
        VolatilityError::DimensionMismatch {
            detail: "conditional correlation lost positive definiteness".into(),
        },
    )?;
    let converged = result.converged && a + b < BOUNDARY;
    Ok(DccFit {
        fits,
        a,
        b,
        qbar,
        r_path,
        loglik,
        converged,
    })
}
