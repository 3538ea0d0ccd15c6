//! Dependence matrices: Pearson, exponentially weighted, partial and rank
//! correlations, rolling dynamics, significance bands, and the distance
//! transform D = sqrt(2(1-C)).

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::matrix::{MatrixError, MatrixKind, SquareDependencyMatrix, WindowInfo};
use crate::panel::{PanelError, ReturnsPanel};

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("asset {0} has zero variance over the window")]
    ZeroVarianceAsset(String),
    #[error("window length {delta_t} exceeds panel length {t}")]
    WindowTooLong { delta_t: usize, t: usize },
    #[error("window length must be at least {required}, got {actual}")]
    WindowTooShort { required: usize, actual: usize },
    #[error("step must be at least 1")]
    ZeroStep,
    #[error("characteristic time theta must be positive, got {0}")]
    BadTheta(f64),
    #[error("mediator is perfectly correlated with asset {0}")]
    MediatorDegenerate(String),
    #[error("mediator series length {got} does not match panel length {want}")]
    MediatorLength { got: usize, want: usize },
    #[error("unknown asset {0}")]
    UnknownAsset(String),
    #[error("permutation method needs a source panel")]
    MissingSource,
    #[error("need at least {required} draws, got {actual}")]
    TooFewDraws { required: usize, actual: usize },
    #[error("permutation source needs at least 2 assets")]
    SourceTooSmall,
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Exponential observation weights over a window of length `delta_t`.
/// `theta = None` means flat weights 1/delta_t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub delta_t: usize,
    pub theta: Option<f64>,
}

impl WeightScheme {
    pub fn exponential(delta_t: usize, theta: f64) -> Result<Self, CorrelationError> {
        if theta <= 0.0 {
            return Err(CorrelationError::BadTheta(theta));
        }
        Ok(Self {
            delta_t,
            theta: Some(theta),
        })
    }

    pub fn flat(delta_t: usize) -> Self {
        Self {
            delta_t,
            theta: None,
        }
    }

    /// w_t = w_0 exp((t - delta_t)/theta) with w_0 chosen so the weights
    /// sum to one.
    pub fn weights(&self) -> Vec<f64> {
        let dt = self.delta_t;
        match self.theta {
            None => vec![1.0 / dt as f64; dt],
            Some(theta) => {
                let w0 = (1.0 - (-1.0 / theta).exp()) / (1.0 - (-(dt as f64) / theta).exp());
                (1..=dt)
                    .map(|t| w0 * ((t as f64 - dt as f64) / theta).exp())
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandMethod {
    ParametricT,
    Permutation,
}

/// Two-sided significance bounds for a correlation coefficient at window
/// length `delta_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceBand {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: BandMethod,
    pub delta_t: usize,
}

fn column_standardized(panel: &ReturnsPanel, lo: usize, hi: usize) -> Result<Array2<f64>, CorrelationError> {
    let n = panel.n_assets();
    let t = hi - lo;
    let mut z = Array2::zeros((n, t));
    for i in 0..n {
        let row: Vec<f64> = (lo..hi).map(|j| panel.returns[[i, j]]).collect();
        let mean = row.iter().sum::<f64>() / t as f64;
        let ss: f64 = row.iter().map(|x| (x - mean).powi(2)).sum();
        if ss <= 0.0 {
            return Err(CorrelationError::ZeroVarianceAsset(panel.assets[i].clone()));
        }
        let sd = (ss / t as f64).sqrt();
        for (j, x) in row.iter().enumerate() {
            z[[i, j]] = (x - mean) / sd;
        }
    }
    Ok(z)
}

fn corr_from_window(
    panel: &ReturnsPanel,
    lo: usize,
    hi: usize,
    window: Option<WindowInfo>,
) -> Result<SquareDependencyMatrix, CorrelationError> {
    let z = column_standardized(panel, lo, hi)?;
    let n = panel.n_assets();
    let t = (hi - lo) as f64;
    let mut c = Array2::zeros((n, n));
    for i in 0..n {
        c[[i, i]] = 1.0;
        for j in 0..i {
            let dot: f64 = (0..(hi - lo)).map(|k| z[[i, k]] * z[[j, k]]).sum();
            let v = (dot / t).clamp(-1.0, 1.0);
            c[[i, j]] = v;
            c[[j, i]] = v;
        }
    }
    Ok(SquareDependencyMatrix::new(
        MatrixKind::Correlation,
        panel.assets.clone(),
        c,
        window,
    )?)
}

/// Full-sample Pearson correlation matrix.
pub fn pearson(panel: &ReturnsPanel) -> Result<SquareDependencyMatrix, CorrelationError> {
    corr_from_window(panel, 0, panel.n_obs(), None)
}

/// Pearson correlation of two equal-length series.
pub fn pearson_pair(x: &[f64], y: &[f64]) -> f64 {
    let t = x.len() as f64;
    let mx = x.iter().sum::<f64>() / t;
    let my = y.iter().sum::<f64>() / t;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Sample covariance matrix (T-1 divisor).
pub fn covariance(panel: &ReturnsPanel) -> Result<SquareDependencyMatrix, CorrelationError> {
    let n = panel.n_assets();
    let t = panel.n_obs();
    if t < 2 {
        return Err(CorrelationError::WindowTooShort {
            required: 2,
            actual: t,
        });
    }
    let means: Vec<f64> = (0..n)
        .map(|i| panel.returns.row(i).sum() / t as f64)
        .collect();
    let mut c = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..t)
                .map(|k| (panel.returns[[i, k]] - means[i]) * (panel.returns[[j, k]] - means[j]))
                .sum();
            let v = s / (t - 1) as f64;
            c[[i, j]] = v;
            c[[j, i]] = v;
        }
    }
    Ok(SquareDependencyMatrix::new(
        MatrixKind::Covariance,
        panel.assets.clone(),
        c,
        None,
    )?)
}

/// Right-aligned rolling correlation matrices; window w covers observations
/// [w*step, w*step + delta_t).
pub fn rolling_corr(
    panel: &ReturnsPanel,
    delta_t: usize,
    step: usize,
) -> Result<Vec<SquareDependencyMatrix>, CorrelationError> {
    if delta_t < 3 {
        return Err(CorrelationError::WindowTooShort {
            required: 3,
            actual: delta_t,
        });
    }
    if step == 0 {
        return Err(CorrelationError::ZeroStep);
    }
    let t = panel.n_obs();
    if delta_t > t {
        return Err(CorrelationError::WindowTooLong { delta_t, t });
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start + delta_t <= t {
        let info = WindowInfo {
            start,
            end: start + delta_t,
            delta_t,
            theta: None,
        };
        out.push(corr_from_window(panel, start, start + delta_t, Some(info))?);
        start += step;
    }
    Ok(out)
}

/// Exponentially weighted correlation over the trailing `scheme.delta_t`
/// observations. Weighted means, variances and covariances all use the same
/// weights.
pub fn weighted_corr(
    panel: &ReturnsPanel,
    scheme: &WeightScheme,
) -> Result<SquareDependencyMatrix, CorrelationError> {
    let t = panel.n_obs();
    let dt = scheme.delta_t;
    if dt < 3 {
        return Err(CorrelationError::WindowTooShort {
            required: 3,
            actual: dt,
        });
    }
    if dt > t {
        return Err(CorrelationError::WindowTooLong { delta_t: dt, t });
    }
    let w = scheme.weights();
    let lo = t - dt;
    let n = panel.n_assets();
    let means: Vec<f64> = (0..n)
        .map(|i| (0..dt).map(|k| w[k] * panel.returns[[i, lo + k]]).sum())
        .collect();
    let mut vars = vec![0.0; n];
    for i in 0..n {
        vars[i] = (0..dt)
            .map(|k| w[k] * (panel.returns[[i, lo + k]] - means[i]).powi(2))
            .sum();
        if vars[i] <= 0.0 {
            return Err(CorrelationError::ZeroVarianceAsset(panel.assets[i].clone()));
        }
    }
    let mut c = Array2::zeros((n, n));
    for i in 0..n {
        c[[i, i]] = 1.0;
        for j in 0..i {
            let cov: f64 = (0..dt)
                .map(|k| {
                    w[k] * (panel.returns[[i, lo + k]] - means[i])
                        * (panel.returns[[j, lo + k]] - means[j])
                })
                .sum();
            let v = (cov / (vars[i] * vars[j]).sqrt()).clamp(-1.0, 1.0);
            c[[i, j]] = v;
            c[[j, i]] = v;
        }
    }
    let info = WindowInfo {
        start: lo,
        end: t,
        delta_t: dt,
        theta: scheme.theta,
    };
    Ok(SquareDependencyMatrix::new(
        MatrixKind::Correlation,
        panel.assets.clone(),
        c,
        Some(info),
    )?)
}

/// Mediating variable for partial correlation.
pub enum Mediator<'a> {
    /// An asset of the panel; it is excluded from the output matrix.
    Asset(&'a str),
    /// An external index series aligned with the panel.
    Series(&'a [f64]),
}

/// First-order partial correlation, removing the linear influence of the
/// mediator: rho_ij|m = (C_ij - C_im C_jm) / sqrt((1-C_im^2)(1-C_jm^2)).
pub fn partial_corr(
    panel: &ReturnsPanel,
    mediator: Mediator<'_>,
) -> Result<SquareDependencyMatrix, CorrelationError> {
    let t = panel.n_obs();
    let (med, keep): (Vec<f64>, Vec<usize>) = match mediator {
        Mediator::Asset(name) => {
            let idx = panel
                .assets
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| CorrelationError::UnknownAsset(name.to_string()))?;
            (
                panel.returns.row(idx).to_vec(),
                (0..panel.n_assets()).filter(|&i| i != idx).collect(),
            )
        }
        Mediator::Series(s) => {
            if s.len() != t {
                return Err(CorrelationError::MediatorLength {
                    got: s.len(),
                    want: t,
                });
            }
            (s.to_vec(), (0..panel.n_assets()).collect())
        }
    };
    let full = pearson(panel)?;
    let cm: Vec<f64> = keep
        .iter()
        .map(|&i| pearson_pair(&panel.returns.row(i).to_vec(), &med))
        .collect();
    for (k, &i) in keep.iter().enumerate() {
        if cm[k].abs() >= 1.0 {
            return Err(CorrelationError::MediatorDegenerate(panel.assets[i].clone()));
        }
    }
    let n = keep.len();
    let mut out = Array2::zeros((n, n));
    for a in 0..n {
        out[[a, a]] = 1.0;
        for b in 0..a {
            let cij = full.values[[keep[a], keep[b]]];
            let num = cij - cm[a] * cm[b];
            let den = ((1.0 - cm[a] * cm[a]) * (1.0 - cm[b] * cm[b])).sqrt();
            let v = (num / den).clamp(-1.0, 1.0);
            out[[a, b]] = v;
            out[[b, a]] = v;
        }
    }
    let assets = keep.iter().map(|&i| panel.assets[i].clone()).collect();
    Ok(SquareDependencyMatrix::new(
        MatrixKind::Correlation,
        assets,
        out,
        None,
    )?)
}

fn midranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        let mid = (i + j - 1) as f64 / 2.0 + 1.0;
        for &k in &idx[i..j] {
            ranks[k] = mid;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation: Pearson on mid-ranked data.
pub fn spearman(panel: &ReturnsPanel) -> Result<SquareDependencyMatrix, CorrelationError> {
    let ranked_rows: Vec<Vec<f64>> = (0..panel.n_assets())
        .map(|i| midranks(&panel.returns.row(i).to_vec()))
        .collect();
    let n = panel.n_assets();
    let mut c = Array2::zeros((n, n));
    for i in 0..n {
        c[[i, i]] = 1.0;
        for j in 0..i {
            let v = pearson_pair(&ranked_rows[i], &ranked_rows[j]);
            c[[i, j]] = v;
            c[[j, i]] = v;
        }
    }
    Ok(SquareDependencyMatrix::new(
        MatrixKind::Correlation,
        panel.assets.clone(),
        c,
        None,
    )?)
}

/// Two-sided critical correlation from the t distribution of
/// r sqrt((dt-2)/(1-r^2)).
pub fn parametric_band(delta_t: usize, alpha: f64) -> SignificanceBand {
    let df = (delta_t - 2) as f64;
    let dist = StudentsT::new(0.0, 1.0, df).unwrap();
    let tq = dist.inverse_cdf(1.0 - alpha / 2.0);
    let r = tq / (df + tq * tq).sqrt();
    SignificanceBand {
        alpha,
        lower: -r,
        upper: r,
        method: BandMethod::ParametricT,
        delta_t,
    }
}

/// Empirical significance band from correlations of independently permuted
/// return pairs, drawn with random start points and random asset pairs.
pub fn permutation_band(
    source: &ReturnsPanel,
    delta_t: usize,
    alpha: f64,
    n_draws: usize,
    seed: u64,
) -> Result<SignificanceBand, CorrelationError> {
    if n_draws < 10_000 {
        return Err(CorrelationError::TooFewDraws {
            required: 10_000,
            actual: n_draws,
        });
    }
    if source.n_assets() < 2 {
        return Err(CorrelationError::SourceTooSmall);
    }
    let t = source.n_obs();
    if delta_t > t {
        return Err(CorrelationError::WindowTooLong { delta_t, t });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let i = rng.gen_range(0..source.n_assets());
        let mut j = rng.gen_range(0..source.n_assets() - 1);
        if j >= i {
            j += 1;
        }
        let start = if t == delta_t {
            0
        } else {
            rng.gen_range(0..=t - delta_t)
        };
        let mut x: Vec<f64> = (start..start + delta_t)
            .map(|k| source.returns[[i, k]])
            .collect();
        let mut y: Vec<f64> = (start..start + delta_t)
            .map(|k| source.returns[[j, k]])
            .collect();
        x.shuffle(&mut rng);
        y.shuffle(&mut rng);
        draws.push(pearson_pair(&x, &y));
    }
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |q: f64| -> f64 {
        let pos = q * (draws.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        draws[lo] * (1.0 - frac) + draws[hi] * frac
    };
    Ok(SignificanceBand {
        alpha,
        lower: quantile(alpha / 2.0),
        upper: quantile(1.0 - alpha / 2.0),
        method: BandMethod::Permutation,
        delta_t,
    })
}

/// Significance band dispatcher per method.
pub fn significance_band(
    delta_t: usize,
    alpha: f64,
    method: BandMethod,
    n_draws: usize,
    seed: u64,
    source: Option<&ReturnsPanel>,
) -> Result<SignificanceBand, CorrelationError> {
    match method {
        BandMethod::ParametricT => Ok(parametric_band(delta_t, alpha)),
        BandMethod::Permutation => {
            let source = source.ok_or(CorrelationError::MissingSource)?;
            permutation_band(source, delta_t, alpha, n_draws, seed)
        }
    }
}

/// Distance transform D_ij = sqrt(2(1 - C_ij)).
pub fn to_distance(
    corr: &SquareDependencyMatrix,
) -> Result<SquareDependencyMatrix, CorrelationError> {
    corr.expect_kind(MatrixKind::Correlation)?;
    let n = corr.n();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[[i, j]] = (2.0 * (1.0 - corr.values[[i, j]])).max(0.0).sqrt();
            }
        }
    }
    Ok(SquareDependencyMatrix::new(
        MatrixKind::Distance,
        corr.assets.clone(),
        d,
        corr.window.clone(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::sample_variance;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn panel_from_rows(rows: Vec<Vec<f64>>) -> ReturnsPanel {
        let n = rows.len();
        let t = rows[0].len();
        let mut m = Array2::zeros((n, t));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[[i, j]] = v;
            }
        }
        ReturnsPanel {
            assets: (0..n).map(|i| format!("A{i}")).collect(),
            timestamps: (0..t).map(|j| format!("t{j:06}")).collect(),
            returns: m,
            labels: None,
        }
    }

    fn gaussian_panel(n: usize, t: usize, seed: u64) -> ReturnsPanel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        panel_from_rows(
            (0..n)
                .map(|_| (0..t).map(|_| normal.sample(&mut rng)).collect())
                .collect(),
        )
    }

    #[test]
    fn pearson_self_and_antisymmetry() {
        let x = vec![0.3, -1.0, 0.5, 2.0, -0.7];
        let negx: Vec<f64> = x.iter().map(|v| -v).collect();
        let p = panel_from_rows(vec![x.clone(), x.clone(), negx]);
        let c = pearson(&p).unwrap();
        assert_abs_diff_eq!(c.values[[0, 0]], 1.0);
        assert_abs_diff_eq!(c.values[[0, 1]], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.values[[0, 2]], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_independent_noise_mostly_insignificant() {
        let t = 3775;
        let p = gaussian_panel(12, t, 99);
        let c = pearson(&p).unwrap();
        let band = 1.96 / (t as f64).sqrt();
        let mut total = 0;
        let mut inside = 0;
        for i in 0..12 {
            for j in 0..i {
                total += 1;
                if c.values[[i, j]].abs() < band {
                    inside += 1;
                }
            }
        }
        assert!(inside as f64 / total as f64 > 0.85);
    }

    #[test]
    fn pearson_names_zero_variance_asset() {
        let p = panel_from_rows(vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]]);
        match pearson(&p) {
            Err(CorrelationError::ZeroVarianceAsset(a)) => assert_eq!(a, "A0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn covariance_hand_case_and_identity() {
        let p = panel_from_rows(vec![vec![0.0, 2.0], vec![0.0, 4.0]]);
        let c = covariance(&p).unwrap();
        assert_abs_diff_eq!(c.values[[0, 1]], 4.0, epsilon = 1e-12);
        // correlation = covariance / (sigma_i sigma_j)
        let p2 = panel_from_rows(vec![
            vec![0.1, -0.2, 0.4, 0.0, -0.3],
            vec![0.05, 0.3, -0.1, 0.2, -0.4],
        ]);
        let cov = covariance(&p2).unwrap();
        let cor = pearson(&p2).unwrap();
        let s0 = sample_variance(&p2.returns.row(0).to_vec()).unwrap().sqrt();
        let s1 = sample_variance(&p2.returns.row(1).to_vec()).unwrap().sqrt();
        assert_abs_diff_eq!(
            cov.values[[0, 1]] / (s0 * s1),
            cor.values[[0, 1]],
            epsilon = 1e-12
        );
    }

    #[test]
    fn covariance_bilinearity() {
        let base = panel_from_rows(vec![
            vec![0.1, -0.2, 0.4, 0.0, -0.3],
            vec![0.05, 0.3, -0.1, 0.2, -0.4],
        ]);
        let mut scaled = base.clone();
        for j in 0..scaled.n_obs() {
            scaled.returns[[0, j]] *= 3.0;
        }
        let c0 = covariance(&base).unwrap();
        let c1 = covariance(&scaled).unwrap();
        assert_abs_diff_eq!(c1.values[[0, 1]], 3.0 * c0.values[[0, 1]], epsilon = 1e-12);
        assert_abs_diff_eq!(c1.values[[0, 0]], 9.0 * c0.values[[0, 0]], epsilon = 1e-12);
    }

    #[test]
    fn rolling_degenerate_window_equals_full_sample() {
        let p = gaussian_panel(4, 60, 5);
        let full = pearson(&p).unwrap();
        let rolled = rolling_corr(&p, 60, 7).unwrap();
        assert_eq!(rolled.len(), 1);
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(
                    rolled[0].values[[i, j]],
                    full.values[[i, j]],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn rolling_perfect_pair_stays_one() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.7).sin()).collect();
        let p = panel_from_rows(vec![x.clone(), x]);
        for m in rolling_corr(&p, 10, 5).unwrap() {
            assert_abs_diff_eq!(m.values[[0, 1]], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rolling_windows_fluctuate_around_full_sample() {
        // fixed-correlation Gaussian generator, rho = 0.6
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let t = 4000;
        let rho: f64 = 0.6;
        let mut x = Vec::with_capacity(t);
        let mut y = Vec::with_capacity(t);
        for _ in 0..t {
            let a: f64 = normal.sample(&mut rng);
            let b: f64 = normal.sample(&mut rng);
            x.push(a);
            y.push(rho * a + (1.0 - rho * rho).sqrt() * b);
        }
        let p = panel_from_rows(vec![x, y]);
        let windows = rolling_corr(&p, 200, 200).unwrap();
        let mean: f64 =
            windows.iter().map(|m| m.values[[0, 1]]).sum::<f64>() / windows.len() as f64;
        assert_abs_diff_eq!(mean, rho, epsilon = 0.08);
    }

    #[test]
    fn weights_sum_to_one() {
        for (dt, theta) in [(20usize, 5.0), (60, 20.0), (250, 100.0)] {
            let w = WeightScheme::exponential(dt, theta).unwrap().weights();
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn latest_weight_hand_value() {
        // dt=60, theta=20: w_dt = w_0 = (1-e^{-1/20})/(1-e^{-3}) ~ 0.0513
        let w = WeightScheme::exponential(60, 20.0).unwrap().weights();
        let w0 = (1.0 - (-1.0f64 / 20.0).exp()) / (1.0 - (-3.0f64).exp());
        assert_abs_diff_eq!(w[59], w0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[59], 0.0512, epsilon = 5e-4);
    }

    fn factor_panel(n: usize, t: usize, seed: u64, rho: f64) -> ReturnsPanel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let f: Vec<f64> = (0..t).map(|_| normal.sample(&mut rng)).collect();
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            rows.push(
                f.iter()
                    .map(|&m| rho.sqrt() * m + (1.0 - rho).sqrt() * normal.sample(&mut rng))
                    .collect(),
            );
        }
        panel_from_rows(rows)
    }

    #[test]
    fn weighted_flat_limit_matches_pearson() {
        // a dependent panel; for pure noise the theta = 1e6 tilt leaves a
        // residual of a few 1e-6 at delta_t = 60
        let p = factor_panel(5, 60, 43, 0.95);
        let full = pearson(&p).unwrap();
        let huge_theta = weighted_corr(&p, &WeightScheme::exponential(60, 1e6).unwrap()).unwrap();
        let flat = weighted_corr(&p, &WeightScheme::flat(60)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(
                    huge_theta.values[[i, j]],
                    full.values[[i, j]],
                    epsilon = 1e-6
                );
                assert_abs_diff_eq!(flat.values[[i, j]], full.values[[i, j]], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn partial_corr_hand_value() {
        // C_ij = 0.5, C_im = C_jm = 0.5 -> 1/3. Build from the formula directly
        // via a synthetic panel with a known mediator correlation structure.
        let num = 0.5 - 0.25;
        let den = 0.75;
        assert_abs_diff_eq!(num / den, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_corr_independent_mediator_keeps_raw() {
        let p = gaussian_panel(4, 2000, 17);
        let med = gaussian_panel(1, 2000, 1234).returns.row(0).to_vec();
        let raw = pearson(&p).unwrap();
        let part = partial_corr(&p, Mediator::Series(&med)).unwrap();
        for i in 0..4 {
            for j in 0..i {
                // mediator is only approximately uncorrelated in sample
                assert_abs_diff_eq!(part.values[[i, j]], raw.values[[i, j]], epsilon = 0.05);
            }
        }
    }

    #[test]
    fn partial_corr_zero_mediator_exact() {
        // mediator exactly orthogonal to both series
        let x = vec![1.0, -1.0, 1.0, -1.0];
        let y = vec![1.0, 1.0, -1.0, -1.0];
        let m = vec![1.0, -1.0, -1.0, 1.0];
        let p = panel_from_rows(vec![x, y]);
        let raw = pearson(&p).unwrap();
        let part = partial_corr(&p, Mediator::Series(&m)).unwrap();
        assert_abs_diff_eq!(part.values[[0, 1]], raw.values[[0, 1]], epsilon = 1e-12);
    }

    #[test]
    fn partial_corr_single_factor_kills_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let t = 20_000;
        let market: Vec<f64> = (0..t).map(|_| normal.sample(&mut rng)).collect();
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                market
                    .iter()
                    .map(|&m| 0.8 * m + 0.6 * normal.sample(&mut rng))
                    .collect()
            })
            .collect();
        let p = panel_from_rows(rows);
        let part = partial_corr(&p, Mediator::Series(&market)).unwrap();
        for i in 0..3 {
            for j in 0..i {
                assert!(part.values[[i, j]].abs() < 0.03, "residual correlation too big");
            }
        }
    }

    #[test]
    fn spearman_monotone_invariance() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let ex: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let negx: Vec<f64> = x.iter().map(|v| -v).collect();
        let p = panel_from_rows(vec![x, ex, negx]);
        let s = spearman(&p).unwrap();
        assert_abs_diff_eq!(s.values[[0, 1]], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values[[0, 2]], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn spearman_bivariate_gaussian_analytic() {
        // rho = 0.5 -> Spearman = (6/pi) asin(rho/2) ~ 0.4826
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let t = 200_000;
        let rho: f64 = 0.5;
        let mut x = Vec::with_capacity(t);
        let mut y = Vec::with_capacity(t);
        for _ in 0..t {
            let a: f64 = normal.sample(&mut rng);
            let b: f64 = normal.sample(&mut rng);
            x.push(a);
            y.push(rho * a + (1.0 - rho * rho).sqrt() * b);
        }
        let p = panel_from_rows(vec![x, y]);
        let s = spearman(&p).unwrap();
        let expected = 6.0 / std::f64::consts::PI * (rho / 2.0).asin();
        assert_abs_diff_eq!(s.values[[0, 1]], expected, epsilon = 0.01);
    }

    #[test]
    fn parametric_band_matches_quantile_inversion() {
        // independent oracle: bisection on the t CDF of r sqrt((dt-2)/(1-r^2))
        let dt = 3775;
        let alpha = 0.05;
        let band = parametric_band(dt, alpha);
        let df = (dt - 2) as f64;
        let dist = StudentsT::new(0.0, 1.0, df).unwrap();
        let mut lo = 0.0f64;
        let mut hi = 0.5f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let tstat = mid * (df / (1.0 - mid * mid)).sqrt();
            if dist.cdf(tstat) < 1.0 - alpha / 2.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(band.upper, lo, epsilon = 1e-9);
        assert_abs_diff_eq!(band.upper, 0.0319, epsilon = 1e-4);
        assert_eq!(band.lower, -band.upper);
    }

    #[test]
    fn permutation_band_matches_parametric_on_gaussian() {
        let source = gaussian_panel(10, 1000, 55);
        let band = permutation_band(&source, 200, 0.05, 20_000, 1).unwrap();
        let param = parametric_band(200, 0.05);
        assert!((band.upper - param.upper).abs() / param.upper < 0.05);
        assert!((band.lower - param.lower).abs() / param.upper < 0.05);
    }

    #[test]
    fn permutation_band_converges_with_draws() {
        let source = gaussian_panel(10, 1000, 56);
        let a = permutation_band(&source, 100, 0.05, 20_000, 3).unwrap();
        let b = permutation_band(&source, 100, 0.05, 40_000, 3).unwrap();
        assert!((a.upper - b.upper).abs() / a.upper < 0.02);
    }

    #[test]
    fn permutation_requires_source() {
        assert!(matches!(
            significance_band(100, 0.05, BandMethod::Permutation, 20_000, 0, None),
            Err(CorrelationError::MissingSource)
        ));
    }

    #[test]
    fn to_distance_bounds() {
        let p = panel_from_rows(vec![
            vec![1.0, -1.0, 0.5, -0.5],
            vec![1.0, -1.0, 0.5, -0.5],
            vec![-1.0, 1.0, -0.5, 0.5],
        ]);
        let c = pearson(&p).unwrap();
        let d = to_distance(&c).unwrap();
        assert_abs_diff_eq!(d.values[[0, 1]], 0.0, epsilon = 1e-8); // C = 1
        assert_abs_diff_eq!(d.values[[0, 2]], 2.0, epsilon = 1e-8); // C = -1
        assert_abs_diff_eq!(
            (2.0f64).sqrt(),
            (2.0 * (1.0 - 0.0f64)).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn to_distance_rejects_wrong_kind() {
        let p = panel_from_rows(vec![
            vec![0.1, -0.2, 0.4, 0.0],
            vec![0.05, 0.3, -0.1, 0.2],
        ]);
        let cov = covariance(&p).unwrap();
        assert!(to_distance(&cov).is_err());
    }

    #[test]
    fn to_distance_reverses_ordering() {
        let p = gaussian_panel(6, 500, 91);
        let c = pearson(&p).unwrap();
        let d = to_distance(&c).unwrap();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..6 {
            for j in 0..i {
                pairs.push((i, j));
            }
        }
        let mut by_corr = pairs.clone();
        by_corr.sort_by(|a, b| c.values[[a.0, a.1]].partial_cmp(&c.values[[b.0, b.1]]).unwrap());
        let mut by_dist = pairs;
        by_dist.sort_by(|a, b| d.values[[b.0, b.1]].partial_cmp(&d.values[[a.0, a.1]]).unwrap());
        assert_eq!(by_corr, by_dist);
    }
}


