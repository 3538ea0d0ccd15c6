use ndarray::Array2;

use crate::panel::ReturnsPanel;

use super::SpilloverError;

/// Desk-scale asset cap for equation-by-equation estimation.
pub const VAR_MAX_ASSETS: usize = 50;

/// Least-squares vector autoregression of order p.
#[derive(Debug, Clone)]
pub struct VarFit {
    pub assets: Vec<String>,
    pub p: usize,
    /// coefs[l][[i, j]] multiplies variable j at lag l+1 in equation i
    pub coefs: Vec<Array2<f64>>,
    pub intercept: Vec<f64>,
    /// residual covariance, symmetric PSD
    pub omega: Array2<f64>,
    /// companion-matrix spectral radius; < 1 means a stable fit
    pub spectral_radius: f64,
}

impl VarFit {
    pub fn n(&self) -> usize {
        self.intercept.len()
    }

    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0
    }
}

fn companion_spectral_radius(coefs: &[Array2<f64>]) -> f64 {
    let n = coefs[0].dim().0;
    let p = coefs.len();
    let dim = n * p;
    let mut companion = nalgebra::DMatrix::zeros(dim, dim);
    for (l, a) in coefs.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                companion[(i, l * n + j)] = a[[i, j]];
            }
        }
    }
    for k in 0..n * (p - 1) {
        companion[(n + k, k)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm_sqr().sqrt())
        .fold(0.0, f64::max)
}

/// Equation-by-equation least squares with an intercept. Unstable fits are
/// reported (spectral_radius >= 1), not rejected.
pub fn var_fit(panel: &ReturnsPanel, p: usize) -> Result<VarFit, SpilloverError> {
    if p == 0 {
        return Err(SpilloverError::BadLagOrder);
    }
    let (n, t_len) = panel.returns.dim();
    if n > VAR_MAX_ASSETS {
        return Err(SpilloverError::TooManyAssets {
            actual: n,
            cap: VAR_MAX_ASSETS,
        });
    }
    let required = n * p + 10;
    if t_len <= required {
        return Err(SpilloverError::TooShort {
            required,
            actual: t_len,
        });
    }

    // stacked regressor matrix: [1, r(t-1), ..., r(t-p)] per observation
    let k = n * p + 1;
    let t_eff = t_len - p;
    let mut x = nalgebra::DMatrix::zeros(t_eff, k);
    for (row, t) in (p..t_len).enumerate() {
        x[(row, 0)] = 1.0;
        for l in 0..p {
            for j in 0..n {
                x[(row, 1 + l * n + j)] = panel.returns[[j, t - 1 - l]];
            }
        }
    }
    let xtx = x.transpose() * &x;
    let chol = xtx
        .cholesky()
        .ok_or(SpilloverError::SingularRegressors)?;
    let diag = chol.l().diagonal();
    let max_pivot = diag.iter().fold(0.0_f64, |m, &d| m.max(d));
    if diag.iter().any(|&d| !(d > 1e-7 * max_pivot)) {
        return Err(SpilloverError::SingularRegressors);
    }

    let mut coefs = vec![Array2::zeros((n, n)); p];
    let mut intercept = vec![0.0; n];
    let mut residuals = nalgebra::DMatrix::zeros(t_eff, n);
    for i in 0..n {
        let y = nalgebra::DVector::from_fn(t_eff, |row, _| panel.returns[[i, row + p]]);
        let beta = chol.solve(&(x.transpose() * &y));
        intercept[i] = beta[0];
        for l in 0..p {
            for j in 0..n {
                coefs[l][[i, j]] = beta[1 + l * n + j];
            }
        }
        let fitted = &x * &beta;
        for row in 0..t_eff {
            residuals[(row, i)] = y[row] - fitted[row];
        }
    }
    let dof = (t_eff - k).max(1) as f64;
    let mut omega = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let s: f64 = (0..t_eff)
                .map(|row| residuals[(row, i)] * residuals[(row, j)])
                .sum();
            omega[[i, j]] = s / dof;
            omega[[j, i]] = omega[[i, j]];
        }
    }
    let spectral_radius = companion_spectral_radius(&coefs);
    Ok(VarFit {
        assets: panel.assets.clone(),
        p,
        coefs,
        intercept,
        omega,
        spectral_radius,
    })
}

/// Moving-average representation: Theta_0 = I and
/// Theta_h = sum_{l=1..min(h,p)} A_l Theta_{h-l}.
pub fn ma_coefficients(fit: &VarFit, horizon: usize) -> Result<Vec<Array2<f64>>, SpilloverError> {
    if horizon == 0 {
        return Err(SpilloverError::BadHorizon);
    }
    let n = fit.n();
    let mut thetas: Vec<Array2<f64>> = Vec::with_capacity(horizon);
    thetas.push(Array2::eye(n));
    for h in 1..horizon {
        let mut th = Array2::zeros((n, n));
        for l in 1..=fit.p.min(h) {
            th = th + fit.coefs[l - 1].dot(&thetas[h - l]);
        }
        thetas.push(th);
    }
    Ok(thetas)
}
