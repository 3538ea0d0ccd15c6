//! Eigen-analysis of correlation matrices, the Marchenko-Pastur spectrum,
//! and PCA factor decomposition.
//!
//! This module uses population (1/T) moments internally so that factor
//! variances line up with the eigenvalues; the `panel` module defaults to the
//! sample (T-1) convention.

use nalgebra::DMatrix;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{MatrixError, MatrixKind, SquareDependencyMatrix};
use crate::panel::{PanelError, ReturnsPanel};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("input matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("Marchenko-Pastur requires t > n >= 2, got n = {n}, t = {t}")]
    BadShape { n: usize, t: usize },
    #[error("factor count {k} out of range 1..={n}")]
    BadFactorCount { k: usize, n: usize },
    #[error("shock matrix has {got} rows, expected at most {max}")]
    ShockRows { got: usize, max: usize },
    #[error("shock row {0} does not have unit sample variance")]
    ShockVariance(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// Eigenpairs of a correlation matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub assets: Vec<String>,
    /// lambda_1 >= ... >= lambda_n.
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector paired with eigenvalues[k].
    pub eigenvectors: Array2<f64>,
}

/// Marchenko-Pastur support for a correlation matrix of i.i.d. series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpSpectrum {
    pub q: f64,
    pub sigma_r: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

/// Index partition relative to the MP support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpPartition {
    pub above: Vec<usize>,
    pub bulk: Vec<usize>,
    pub below: Vec<usize>,
}

/// Factor view of a returns panel: principal-component series plus loadings.
#[derive(Debug, Clone)]
pub struct FactorDecomposition {
    /// K x T factor series, row k is the k-th principal component.
    pub factors: Array2<f64>,
    /// N x K loadings, column k is sqrt(lambda_k) * v_k.
    pub loadings: Array2<f64>,
    pub eigenvalues: Vec<f64>,
}

/// Symmetric eigen-decomposition with deterministic ordering and sign
/// convention: eigenvalues descending, largest-magnitude component of each
/// eigenvector positive (first such component on ties).
pub fn eigensystem(corr: &SquareDependencyMatrix) -> Result<EigenSystem, SpectrumError> {
    corr.expect_kind(MatrixKind::Correlation)?;
    let n = corr.n();
    for i in 0..n {
        for j in 0..i {
            if (corr.values[[i, j]] - corr.values[[j, i]]).abs() > 1e-10 {
                return Err(SpectrumError::NotSymmetric { i, j });
            }
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| corr.values[[i, j]]);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then_with(|| {
                // degenerate eigenvalues: break ties lexicographically by the
                // sign-fixed eigenvector entries
                for i in 0..n {
                    let x = eig.eigenvectors[(i, a)];
                    let y = eig.eigenvectors[(i, b)];
                    if (x - y).abs() > 1e-12 {
                        return x.partial_cmp(&y).unwrap();
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Array2::zeros((n, n));
    for (k, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let mut best = 0;
        for i in 1..n {
            if col[i].abs() > col[best].abs() + 1e-15 {
                best = i;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[[i, k]] = sign * col[i];
        }
    }
    Ok(EigenSystem {
        assets: corr.assets.clone(),
        eigenvalues,
        eigenvectors,
    })
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V diag(lambda) V^T.
    pub fn reconstruct(&self) -> Array2<f64> {
        let n = self.n();
        let mut out = Array2::zeros((n, n));
        for k in 0..n {
            let lam = self.eigenvalues[k];
            for i in 0..n {
                for j in 0..n {
                    out[[i, j]] += lam * self.eigenvectors[[i, k]] * self.eigenvectors[[j, k]];
                }
            }
        }
        out
    }

    /// CSV rows: lambda then the eigenvector components.
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<(), MatrixError> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["lambda".to_string()];
        header.extend(self.assets.iter().cloned());
        wtr.write_record(&header)
            .map_err(|e| MatrixError::Io(e.to_string()))?;
        for k in 0..self.n() {
            let mut row = vec![format!("{:.12e}", self.eigenvalues[k])];
            row.extend((0..self.n()).map(|i| format!("{:.12e}", self.eigenvectors[[i, k]])));
            wtr.write_record(&row)
                .map_err(|e| MatrixError::Io(e.to_string()))?;
        }
        wtr.flush().map_err(|e| MatrixError::Io(e.to_string()))
    }
}

/// MP support bounds lambda_pm = sigma_r^2 (1 + 1/Q +- 2 sqrt(1/Q)),
/// Q = T/N.
pub fn mp_bounds(n: usize, t: usize, sigma_r: f64) -> Result<MpSpectrum, SpectrumError> {
    if n < 2 || t <= n {
        return Err(SpectrumError::BadShape { n, t });
    }
    let q = t as f64 / n as f64;
    let s2 = sigma_r * sigma_r;
    Ok(MpSpectrum {
        q,
        sigma_r,
        lambda_minus: s2 * (1.0 + 1.0 / q - 2.0 * (1.0 / q).sqrt()),
        lambda_plus: s2 * (1.0 + 1.0 / q + 2.0 * (1.0 / q).sqrt()),
    })
}

/// MP eigenvalue density, zero outside the support.
pub fn mp_density(lambda: f64, spec: &MpSpectrum) -> f64 {
    if lambda <= spec.lambda_minus || lambda >= spec.lambda_plus || lambda <= 0.0 {
        return 0.0;
    }
    let s2 = spec.sigma_r * spec.sigma_r;
    spec.q / (2.0 * std::f64::consts::PI * s2)
        * ((spec.lambda_plus - lambda) * (lambda - spec.lambda_minus)).sqrt()
        / lambda
}

/// MP CDF by Simpson quadrature over the support.
pub fn mp_cdf(lambda: f64, spec: &MpSpectrum) -> f64 {
    if lambda <= spec.lambda_minus {
        return 0.0;
    }
    let hi = lambda.min(spec.lambda_plus);
    let steps = 4000;
    let h = (hi - spec.lambda_minus) / steps as f64;
    let mut acc = 0.0;
    for s in 0..steps {
        let a = spec.lambda_minus + s as f64 * h;
        let b = a + h;
        let mid = 0.5 * (a + b);
        acc += h / 6.0
            * (mp_density(a, spec) + 4.0 * mp_density(mid, spec) + mp_density(b, spec));
    }
    acc.min(1.0)
}

/// Partition eigenvalue indices into above-support, bulk, below-support.
pub fn outside_mp(eigs: &EigenSystem, spec: &MpSpectrum) -> MpPartition {
    let mut p = MpPartition {
        above: Vec::new(),
        bulk: Vec::new(),
        below: Vec::new(),
    };
    for (k, &lam) in eigs.eigenvalues.iter().enumerate() {
        if lam > spec.lambda_plus {
            p.above.push(k);
        } else if lam < spec.lambda_minus {
            p.below.push(k);
        } else {
            p.bulk.push(k);
        }
    }
    p
}

/// Kolmogorov-Smirnov distance between the empirical CDF of the bulk
/// eigenvalues and the MP CDF.
pub fn mp_ks_distance(bulk: &[f64], spec: &MpSpectrum) -> f64 {
    let mut sorted = bulk.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut ks = 0.0f64;
    for (i, &lam) in sorted.iter().enumerate() {
        let f = mp_cdf(lam, spec);
        ks = ks.max((f - i as f64 / n).abs());
        ks = ks.max((f - (i as f64 + 1.0) / n).abs());
    }
    ks
}

fn standardized_population(panel: &ReturnsPanel) -> Result<Array2<f64>, SpectrumError> {
    let n = panel.n_assets();
    let t = panel.n_obs();
    let mut z = Array2::zeros((n, t));
    for i in 0..n {
        let row = panel.returns.row(i);
        let mean = row.sum() / t as f64;
        let var: f64 = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t as f64;
        if var <= 0.0 {
            return Err(SpectrumError::Panel(PanelError::ZeroVariance));
        }
        let sd = var.sqrt();
        for j in 0..t {
            z[[i, j]] = (panel.returns[[i, j]] - mean) / sd;
        }
    }
    Ok(z)
}

/// PCA factor view: the first k principal-component series of the
/// standardized panel, with loadings scaled by sqrt(lambda).
pub fn pca_decompose(
    panel: &ReturnsPanel,
    k: usize,
) -> Result<FactorDecomposition, SpectrumError> {
    let n = panel.n_assets();
    if k == 0 || k > n {
        return Err(SpectrumError::BadFactorCount { k, n });
    }
    let z = standardized_population(panel)?;
    let t = panel.n_obs();
    // population correlation of standardized rows
    let mut c = Array2::zeros((n, n));
    for i in 0..n {
        c[[i, i]] = 1.0;
        for j in 0..i {
            let v: f64 = (0..t).map(|s| z[[i, s]] * z[[j, s]]).sum::<f64>() / t as f64;
            let v = v.clamp(-1.0, 1.0);
            c[[i, j]] = v;
            c[[j, i]] = v;
        }
    }
    let corr = SquareDependencyMatrix::new(MatrixKind::Correlation, panel.assets.clone(), c, None)?;
    let eigs = eigensystem(&corr)?;
    let mut factors = Array2::zeros((k, t));
    for kk in 0..k {
        for s in 0..t {
            factors[[kk, s]] = (0..n).map(|i| eigs.eigenvectors[[i, kk]] * z[[i, s]]).sum();
        }
    }
    let mut loadings = Array2::zeros((n, k));
    for kk in 0..k {
        let scale = eigs.eigenvalues[kk].max(0.0).sqrt();
        for i in 0..n {
            loadings[[i, kk]] = scale * eigs.eigenvectors[[i, kk]];
        }
    }
    Ok(FactorDecomposition {
        factors,
        loadings,
        eigenvalues: eigs.eigenvalues[..k].to_vec(),
    })
}

/// Synthesize a panel r_it = sum_k sqrt(lambda_k) v_ki eps_kt from unit
/// variance shocks (K x T, K <= N).
pub fn pca_synthesize(
    eigs: &EigenSystem,
    shocks: &Array2<f64>,
) -> Result<ReturnsPanel, SpectrumError> {
    let n = eigs.n();
    let (k, t) = shocks.dim();
    if k > n {
        return Err(SpectrumError::ShockRows { got: k, max: n });
    }
    for r in 0..k {
        let row: Vec<f64> = shocks.row(r).to_vec();
        let var = crate::panel::sample_variance(&row)?;
        if (var - 1.0).abs() > 0.2 {
            return Err(SpectrumError::ShockVariance(r));
        }
    }
    let mut returns = Array2::zeros((n, t));
    for i in 0..n {
        for s in 0..t {
            returns[[i, s]] = (0..k)
                .map(|kk| {
                    eigs.eigenvalues[kk].max(0.0).sqrt() * eigs.eigenvectors[[i, kk]]
                        * shocks[[kk, s]]
                })
                .sum();
        }
    }
    Ok(ReturnsPanel {
        assets: eigs.assets.clone(),
        timestamps: (0..t).map(|s| format!("t{s:08}")).collect(),
        returns,
        labels: None,
    })
}
