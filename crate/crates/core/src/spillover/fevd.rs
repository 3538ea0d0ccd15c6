use ndarray::Array2;

use super::var::{ma_coefficients, VarFit};
use super::SpilloverError;

/// Generalized forecast-error variance decomposition at a fixed horizon.
#[derive(Debug, Clone)]
pub struct FevdMatrix {
    pub assets: Vec<String>,
    pub horizon: usize,
    /// raw generalized shares; rows need not sum to 1
    pub raw: Array2<f64>,
    /// row-normalized shares; each row sums to 1
    pub normalized: Array2<f64>,
    /// residual variances sigma_jj used in the shares
    pub sigma: Vec<f64>,
}

impl FevdMatrix {
    pub fn n(&self) -> usize {
        self.sigma.len()
    }
}

/// Share of variable i's H-step forecast-error variance attributable to
/// shocks in variable j, in the order-invariant generalized form:
/// raw_ij = sigma_jj^-1 sum_h (e_i' Theta_h Omega e_j)^2
///          / sum_h (e_i' Theta_h Omega Theta_h' e_i).
pub fn gfevd(fit: &VarFit, horizon: usize) -> Result<FevdMatrix, SpilloverError> {
    if horizon == 0 {
        return Err(SpilloverError::BadHorizon);
    }
    if !fit.is_stable() {
        return Err(SpilloverError::UnstableFit(fit.spectral_radius));
    }
    let n = fit.n();
    let thetas = ma_coefficients(fit, horizon)?;
    let sigma: Vec<f64> = (0..n).map(|j| fit.omega[[j, j]]).collect();
    for (j, &s) in sigma.iter().enumerate() {
        if !(s > 0.0) {
            return Err(SpilloverError::ZeroResidualVariance(j));
        }
    }

    // per horizon step: (Theta_h Omega) and the forecast-error variance
    // increment Theta_h Omega Theta_h'
    let mut numer = Array2::<f64>::zeros((n, n));
    let mut denom = vec![0.0; n];
    for th in &thetas {
        let to = th.dot(&fit.omega);
        for i in 0..n {
            for j in 0..n {
                numer[[i, j]] += to[[i, j]] * to[[i, j]] / sigma[j];
            }
            let mse_inc: f64 = (0..n).map(|k| to[[i, k]] * th[[i, k]]).sum();
            denom[i] += mse_inc;
        }
    }
    let mut raw = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            raw[[i, j]] = numer[[i, j]] / denom[i];
        }
    }
    let mut normalized = Array2::zeros((n, n));
    for i in 0..n {
        let row_sum: f64 = (0..n).map(|j| raw[[i, j]]).sum();
        for j in 0..n {
            normalized[[i, j]] = raw[[i, j]] / row_sum;
        }
    }
    Ok(FevdMatrix {
        assets: fit.assets.clone(),
        horizon,
        raw,
        normalized,
        sigma,
    })
}

/// Directional sums of the normalized decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Connectedness {
    /// from_i: share of i's variance received from others
    pub from: Vec<f64>,
    /// to_j: share of others' variance attributed to j
    pub to: Vec<f64>,
    /// mean cross share, in [0, 1]
    pub total: f64,
}

pub fn connectedness(fevd: &FevdMatrix) -> Connectedness {
    let n = fevd.n();
    let mut from = vec![0.0; n];
    let mut to = vec![0.0; n];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                from[i] += fevd.normalized[[i, j]];
                to[j] += fevd.normalized[[i, j]];
                total += fevd.normalized[[i, j]];
            }
        }
    }
    Connectedness {
        from,
        to,
        total: total / n as f64,
    }
}
