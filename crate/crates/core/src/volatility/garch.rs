use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::panel::sample_variance;

use super::neldermead::{nelder_mead, NmOptions};
use super::VolatilityError;

/// Minimum series length accepted by the estimator.
pub const MIN_FIT_LENGTH: usize = 200;

/// Stationarity ceiling for the summed dynamics coefficients.
const COEF_CEILING: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarchSpec {
    /// variance lags
    pub p: usize,
    /// shock lags
    pub q: usize,
}

impl GarchSpec {
    pub fn new(p: usize, q: usize) -> Result<Self, VolatilityError> {
        if p == 0 || q == 0 {
            return Err(VolatilityError::BadSpec { p, q });
        }
        Ok(GarchSpec { p, q })
    }

    pub fn order(&self) -> usize {
        self.p.max(self.q)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GarchFit {
    pub spec: GarchSpec,
    pub alpha0: f64,
    /// shock coefficients, length q
    pub alphas: Vec<f64>,
    /// variance coefficients, length p
    pub betas: Vec<f64>,
    /// conditional variance path, one value per observation
    pub h: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    /// sample mean removed before estimation
    pub mean: f64,
}

impl GarchFit {
    pub fn persistence(&self) -> f64 {
        self.alphas.iter().sum::<f64>() + self.betas.iter().sum::<f64>()
    }

    pub fn long_run_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.persistence())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.spec.p,
            "q": self.spec.q,
            "alpha0": self.alpha0,
            "alphas": self.alphas,
            "betas": self.betas,
            "loglik": self.loglik,
            "converged": self.converged,
            "mean": self.mean,
        })
    }
}

/// Conditional variance recursion; the first max(p, q) values hold h_init.
fn variance_path(
    eps: &[f64],
    alpha0: f64,
    alphas: &[f64],
    betas: &[f64],
    h_init: f64,
) -> Vec<f64> {
    let t_len = eps.len();
    let m = alphas.len().max(betas.len());
    let mut h = vec![h_init; t_len];
    for t in m..t_len {
        let mut v = alpha0;
        for (i, &a) in alphas.iter().enumerate() {
            v += a * eps[t - 1 - i] * eps[t - 1 - i];
        }
        for (j, &b) in betas.iter().enumerate() {
            v += b * h[t - 1 - j];
        }
        h[t] = v;
    }
    h
}

fn gaussian_loglik(eps: &[f64], h: &[f64]) -> f64 {
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    -0.5 * eps
        .iter()
        .zip(h)
        .map(|(&e, &v)| ln_2pi + v.ln() + e * e / v)
        .sum::<f64>()
}

/// theta -> (alpha0, alphas, betas); the logistic map keeps alpha0 > 0,
/// all coefficients >= 0 and their sum below the stationarity ceiling.
fn unpack(theta: &[f64], spec: GarchSpec) -> (f64, Vec<f64>, Vec<f64>) {
    let alpha0 = theta[0].exp();
    let denom: f64 = 1.0 + theta[1..].iter().map(|v| v.exp()).sum::<f64>();
    let coefs: Vec<f64> = theta[1..]
        .iter()
        .map(|v| COEF_CEILING * v.exp() / denom)
        .collect();
    let (alphas, betas) = coefs.split_at(spec.q);
    (alpha0, alphas.to_vec(), betas.to_vec())
}

/// Inverse of `unpack` for constructing start values.
fn pack(alpha0: f64, alphas: &[f64], betas: &[f64]) -> Vec<f64> {
    let total: f64 = alphas.iter().chain(betas).sum();
    let scale = COEF_CEILING * (1.0 - total / COEF_CEILING);
    let mut theta = vec![alpha0.ln()];
    theta.extend(alphas.iter().chain(betas).map(|&s| (s / scale).ln()));
    theta
}

/// Gaussian quasi-maximum-likelihood fit of the conditional-variance
/// recursion. The series is demeaned by its sample mean and the recursion is
/// seeded with the sample variance.
pub fn garch_fit(series: &[f64], spec: GarchSpec) -> Result<GarchFit, VolatilityError> {
    let t_len = series.len();
    if t_len < MIN_FIT_LENGTH {
        return Err(VolatilityError::TooShort {
            required: MIN_FIT_LENGTH,
            actual: t_len,
        });
    }
    let mean = series.iter().sum::<f64>() / t_len as f64;
    let eps: Vec<f64> = series.iter().map(|&r| r - mean).collect();
    // length checked above, so the variance call cannot fail
    let var = sample_variance(&eps).unwrap();
    if !(var > 0.0) {
        return Err(VolatilityError::DegenerateSeries);
    }

    let start_sum = 0.9;
    let q = spec.q as f64;
    let p = spec.p as f64;
    let theta0 = pack(
        var * (1.0 - start_sum),
        &vec![0.05 / q; spec.q],
        &vec![0.85 / p; spec.p],
    );
    let objective = |theta: &[f64]| -> f64 {
        let (alpha0, alphas, betas) = unpack(theta, spec);
        let h = variance_path(&eps, alpha0, &alphas, &betas, var);
        -gaussian_loglik(&eps, &h)
    };
    let result = nelder_mead(objective, &theta0, &NmOptions::default());

    let (alpha0, alphas, betas) = unpack(&result.x, spec);
    let h = variance_path(&eps, alpha0, &alphas, &betas, var);
    Ok(GarchFit {
        spec,
        alpha0,
        alphas,
        betas,
        h,
        loglik: -result.fval,
        converged: result.converged,
        mean,
    })
}

/// Volatility-normalized returns r_t / sqrt(h_t).
pub fn degarch(series: &[f64], fit: &GarchFit) -> Result<Vec<f64>, VolatilityError> {
    if series.len() != fit.h.len() {
        return Err(VolatilityError::LengthMismatch {
            expected: fit.h.len(),
            actual: series.len(),
        });
    }
    if fit.h.iter().any(|&v| !(v > 0.0)) {
        return Err(VolatilityError::NonPositiveVariance);
    }
    Ok(series
        .iter()
        .zip(&fit.h)
        .map(|(&r, &v)| r / v.sqrt())
        .collect())
}

/// Seeded simulation of the conditional-variance recursion with Gaussian
/// shocks; 1000 burn-in steps are discarded.
pub fn garch_simulate(
    alpha0: f64,
    alphas: &[f64],
    betas: &[f64],
    t_len: usize,
    seed: u64,
) -> Result<Vec<f64>, VolatilityError> {
    if !(alpha0 > 0.0) || alphas.iter().chain(betas).any(|&c| c < 0.0) {
        return Err(VolatilityError::BadParams);
    }
    let persistence: f64 = alphas.iter().chain(betas).sum();
    if persistence >= 1.0 {
        return Err(VolatilityError::NonStationary { persistence });
    }
    const BURN_IN: usize = 1000;
    let long_run = alpha0 / (1.0 - persistence);
    let m = alphas.len().max(betas.len());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut h_hist = vec![long_run; m];
    let mut eps_hist = vec![0.0; m];
    let mut out = Vec::with_capacity(t_len);
    for step in 0..BURN_IN + t_len {
        let mut h = alpha0;
        for (i, &a) in alphas.iter().enumerate() {
            h += a * eps_hist[i] * eps_hist[i];
        }
        for (j, &b) in betas.iter().enumerate() {
            h += b * h_hist[j];
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        let eps = z * h.sqrt();
        if m > 0 {
            h_hist.rotate_right(1);
            h_hist[0] = h;
            eps_hist.rotate_right(1);
            eps_hist[0] = eps;
        }
        if step >= BURN_IN {
            out.push(eps);
        }
    }
    Ok(out)
}
