//! Price/return panels and the stylized-fact statistics of daily returns.

use std::collections::BTreeMap;
use std::io::Read;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("non-positive price {price} for asset {asset} at {timestamp}")]
    NonPositivePrice {
        asset: String,
        timestamp: String,
        price: f64,
    },
    #[error("missing price for asset {asset} at {timestamp}")]
    MissingPrice { asset: String, timestamp: String },
    #[error("timestamps not strictly increasing at position {position} ({timestamp})")]
    TimestampsNotIncreasing { position: usize, timestamp: String },
    #[error("need at least {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("max_lag {max_lag} must be smaller than series length {len}")]
    LagTooLarge { max_lag: usize, len: usize },
    #[error("empty input")]
    Empty,
    #[error("tail too small: {n_tail} points (need at least {required})")]
    TailTooSmall { n_tail: usize, required: usize },
    #[error("tail_fraction {0} must be in (0, 1]")]
    BadTailFraction(f64),
    #[error("panel shape mismatch: {detail}")]
    Shape { detail: String },
    #[error("missing label for asset {0}")]
    MissingLabel(String),
    #[error("csv parse error: {0}")]
    Csv(String),
}

/// Sector/country annotation for one asset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetLabel {
    pub sector: String,
    pub country: String,
}

/// How to treat gaps in the ingested price table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Reject the panel on the first gap.
    #[default]
    Reject,
    /// Carry the last observed price forward; the first observation must exist.
    ForwardFill,
}

/// Divisor convention for variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// T-1 divisor (unbiased sample estimator). The default everywhere.
    #[default]
    Sample,
    /// 1/T divisor, used by the spectral module internally.
    Population,
}

/// Aligned panel of strictly positive prices, N assets by T observations.
#[derive(Debug, Clone)]
pub struct PricePanel {
    pub assets: Vec<String>,
    pub timestamps: Vec<String>,
    /// N x T.
    pub prices: Array2<f64>,
    pub labels: Option<BTreeMap<String, AssetLabel>>,
}

/// Aligned panel of log returns, N assets by T-1 observations.
#[derive(Debug, Clone)]
pub struct ReturnsPanel {
    pub assets: Vec<String>,
    pub timestamps: Vec<String>,
    /// N x (T-1).
    pub returns: Array2<f64>,
    pub labels: Option<BTreeMap<String, AssetLabel>>,
}

/// Power-law tail fit of absolute returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub tail_fraction: f64,
    pub n_tail: usize,
}

impl PricePanel {
    pub fn new(
        assets: Vec<String>,
        timestamps: Vec<String>,
        prices: Array2<f64>,
        labels: Option<BTreeMap<String, AssetLabel>>,
    ) -> Result<Self, PanelError> {
        let (n, t) = prices.dim();
        if assets.len() != n {
            return Err(PanelError::Shape {
                detail: format!("{} assets but {} price rows", assets.len(), n),
            });
        }
        if timestamps.len() != t {
            return Err(PanelError::Shape {
                detail: format!("{} timestamps but {} price columns", timestamps.len(), t),
            });
        }
        for w in 1..timestamps.len() {
            if timestamps[w] <= timestamps[w - 1] {
                return Err(PanelError::TimestampsNotIncreasing {
                    position: w,
                    timestamp: timestamps[w].clone(),
                });
            }
        }
        for i in 0..n {
            for j in 0..t {
                let p = prices[[i, j]];
                if !(p.is_finite() && p > 0.0) {
                    return Err(PanelError::NonPositivePrice {
                        asset: assets[i].clone(),
                        timestamp: timestamps[j].clone(),
                        price: p,
                    });
                }
            }
        }
        Ok(Self {
            assets,
            timestamps,
            prices,
            labels,
        })
    }

    /// Parse the panel from CSV: first column ISO date, one column per asset,
    /// header row of asset identifiers.
    pub fn from_csv<R: Read>(reader: R, policy: MissingPolicy) -> Result<Self, PanelError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| PanelError::Csv(e.to_string()))?
            .clone();
        if headers.len() < 2 {
            return Err(PanelError::Csv("need a date column plus assets".into()));
        }
        let assets: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
        let n = assets.len();
        let mut timestamps = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut last: Vec<Option<f64>> = vec![None; n];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| PanelError::Csv(e.to_string()))?;
            if rec.len() != n + 1 {
                return Err(PanelError::Csv(format!(
                    "row {} has {} fields, expected {}",
                    timestamps.len() + 2,
                    rec.len(),
                    n + 1
                )));
            }
            let ts = rec[0].to_string();
            let mut col = Vec::with_capacity(n);
            for (i, field) in rec.iter().skip(1).enumerate() {
                let field = field.trim();
                let value = if field.is_empty() {
                    match policy {
                        MissingPolicy::Reject => {
                            return Err(PanelError::MissingPrice {
                                asset: assets[i].clone(),
                                timestamp: ts,
                            })
                        }
                        MissingPolicy::ForwardFill => {
                            last[i].ok_or_else(|| PanelError::MissingPrice {
                                asset: assets[i].clone(),
                                timestamp: ts.clone(),
                            })?
                        }
                    }
                } else {
                    field.parse::<f64>().map_err(|e| {
                        PanelError::Csv(format!("bad price for {} at {}: {}", assets[i], ts, e))
                    })?
                };
                last[i] = Some(value);
                col.push(value);
            }
            timestamps.push(ts);
            cols.push(col);
        }
        let t = timestamps.len();
        let mut prices = Array2::zeros((n, t));
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                prices[[i, j]] = v;
            }
        }
        Self::new(assets, timestamps, prices, None)
    }

    /// Sidecar CSV with rows asset,sector,country.
    pub fn labels_from_csv<R: Read>(
        &mut self,
        reader: R,
    ) -> Result<(), PanelError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(reader);
        let mut labels = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| PanelError::Csv(e.to_string()))?;
            if rec.len() < 3 {
                return Err(PanelError::Csv("label rows need asset,sector,country".into()));
            }
            labels.insert(
                rec[0].to_string(),
                AssetLabel {
                    sector: rec[1].to_string(),
                    country: rec[2].to_string(),
                },
            );
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn n_assets(&self) -> usize {
        self.prices.nrows()
    }

    pub fn n_obs(&self) -> usize {
        self.prices.ncols()
    }
}

impl ReturnsPanel {
    pub fn n_assets(&self) -> usize {
        self.returns.nrows()
    }

    pub fn n_obs(&self) -> usize {
        self.returns.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.returns.row(i)
    }
}

/// Log returns r[t] = ln p[t+1] - ln p[t] for every asset.
pub fn log_returns(panel: &PricePanel) -> Result<ReturnsPanel, PanelError> {
    let (n, t) = panel.prices.dim();
    if t < 2 {
        return Err(PanelError::TooShort {
            required: 2,
            actual: t,
        });
    }
    let mut returns = Array2::zeros((n, t - 1));
    for i in 0..n {
        for j in 0..t - 1 {
            returns[[i, j]] = panel.prices[[i, j + 1]].ln() - panel.prices[[i, j]].ln();
        }
    }
    Ok(ReturnsPanel {
        assets: panel.assets.clone(),
        timestamps: panel.timestamps[1..].to_vec(),
        returns,
        labels: panel.labels.clone(),
    })
}

/// Each price row divided by its first entry; first column all ones.
pub fn normalized_prices(panel: &PricePanel) -> Array2<f64> {
    let (n, t) = panel.prices.dim();
    let mut out = panel.prices.clone();
    for i in 0..n {
        let p0 = panel.prices[[i, 0]];
        for j in 0..t {
            out[[i, j]] /= p0;
        }
    }
    out
}

/// Unbiased sample variance (T-1 divisor).
pub fn sample_variance(series: &[f64]) -> Result<f64, PanelError> {
    variance(series, Convention::Sample)
}

pub fn variance(series: &[f64], convention: Convention) -> Result<f64, PanelError> {
    let t = series.len();
    if t < 2 {
        return Err(PanelError::TooShort {
            required: 2,
            actual: t,
        });
    }
    let mean = series.iter().sum::<f64>() / t as f64;
    let ss: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    let div = match convention {
        Convention::Sample => (t - 1) as f64,
        Convention::Population => t as f64,
    };
    Ok(ss / div)
}

/// Shift to mean zero and scale to unit variance under the given convention.
pub fn standardize_with(series: &[f64], convention: Convention) -> Result<Vec<f64>, PanelError> {
    let var = variance(series, convention)?;
    if var <= 0.0 {
        return Err(PanelError::ZeroVariance);
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let sd = var.sqrt();
    Ok(series.iter().map(|x| (x - mean) / sd).collect())
}

pub fn standardize(series: &[f64]) -> Result<Vec<f64>, PanelError> {
    standardize_with(series, Convention::Sample)
}

/// Sample autocorrelation function for lags 0..=max_lag.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>, PanelError> {
    let t = series.len();
    if max_lag >= t {
        return Err(PanelError::LagTooLarge { max_lag, len: t });
    }
    if t < 2 {
        return Err(PanelError::TooShort {
            required: 2,
            actual: t,
        });
    }
    let mean = series.iter().sum::<f64>() / t as f64;
    let denom: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    if denom <= 0.0 {
        return Err(PanelError::ZeroVariance);
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let num: f64 = (0..t - k)
            .map(|i| (series[i] - mean) * (series[i + k] - mean))
            .sum();
        out.push(num / denom);
    }
    Ok(out)
}

/// Empirical survival function P>(x) = (# values > x)/n, ties collapsed.
pub fn ccdf(values: &[f64]) -> Result<Vec<(f64, f64)>, PanelError> {
    if values.is_empty() {
        return Err(PanelError::Empty);
    }
    let n = values.len() as f64;
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        out.push((x, (sorted.len() - j) as f64 / n));
        i = j;
    }
    Ok(out)
}

const MIN_TAIL: usize = 50;

/// Hill estimator of the power-law tail index over the top `tail_fraction`
/// of absolute values.
pub fn tail_exponent(values: &[f64], tail_fraction: f64) -> Result<TailFit, PanelError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(PanelError::BadTailFraction(tail_fraction));
    }
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
    abs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = ((abs.len() as f64) * tail_fraction).ceil() as usize;
    if k < MIN_TAIL || k + 1 > abs.len() {
        return Err(PanelError::TailTooSmall {
            n_tail: k,
            required: MIN_TAIL,
        });
    }
    let threshold = abs[k];
    let mean_log: f64 = abs[..k].iter().map(|x| (x / threshold).ln()).sum::<f64>() / k as f64;
    Ok(TailFit {
        exponent: 1.0 / mean_log,
        tail_fraction,
        n_tail: k,
    })
}
