//! Factor regressions and pairwise dependence networks (Granger causality
//! and robust pairwise regression) on volatility-filtered returns.

mod aggregate;
mod factor;
mod granger;
mod ols;
mod robust;

use thiserror::Error;

pub use aggregate::aggregate_network;
pub use factor::{factor_fit, FactorFit};
pub use granger::{granger_network, granger_pair, Direction, PairEdge, MIN_PAIR_LENGTH};
pub use robust::{robust_pair, robust_pair_network, PValueNetwork, DEFAULT_NU};

use crate::panel::ReturnsPanel;
use crate::volatility::{degarch, garch_fit, GarchSpec};

#[derive(Debug, Error)]
pub enum EconError {
    #[error("need at least {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("regressors are collinear")]
    CollinearRegressors,
    #[error("significance threshold {0} must lie in (0, 1)")]
    BadThreshold(f64),
    #[error("missing label for asset {0}")]
    MissingLabel(String),
    #[error(transparent)]
    Volatility(#[from] crate::volatility::VolatilityError),
    #[error(transparent)]
    Graph(#[from] crate::filtergraph::GraphError),
}

/// Return series certified free of conditional-variance dynamics. The
/// pairwise estimators only accept this type, so raw returns cannot reach
/// them by accident.
#[derive(Debug, Clone)]
pub struct DegarchedSeries {
    values: Vec<f64>,
}

impl DegarchedSeries {
    /// Fits a GARCH(1,1) model and divides by the conditional volatility.
    pub fn from_raw(series: &[f64]) -> Result<Self, EconError> {
        let fit = garch_fit(series, GarchSpec::new(1, 1).unwrap())?;
        let values = degarch(series, &fit)?;
        Ok(DegarchedSeries { values })
    }

    /// Wraps a series the caller asserts is already volatility-filtered
    /// (for example simulated homoskedastic noise).
    pub fn from_prefiltered(values: Vec<f64>) -> Self {
        DegarchedSeries { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Volatility-filters every row of a panel; rows are independent fits.
pub(crate) fn degarch_panel(panel: &ReturnsPanel) -> Result<Vec<DegarchedSeries>, EconError> {
    use rayon::prelude::*;
    let rows: Vec<Vec<f64>> = (0..panel.returns.dim().0)
        .map(|i| panel.returns.row(i).to_vec())
        .collect();
    rows.par_iter()
        .map(|row| DegarchedSeries::from_raw(row))
        .collect()
}
