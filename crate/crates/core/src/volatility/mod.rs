//! Univariate GARCH estimation and de-garching, the BEKK covariance
//! recursion, and scalar DCC conditional correlations.

mod bekk;
mod dcc;
mod garch;
mod neldermead;

use thiserror::Error;

pub use bekk::bekk_step;
pub use dcc::{dcc_fit, DccFit, DCC_MAX_ASSETS};
pub use garch::{
    degarch, garch_fit, garch_simulate, GarchFit, GarchSpec, MIN_FIT_LENGTH,
};

#[derive(Debug, Error)]
pub enum VolatilityError {
    #[error("lag orders must be at least 1, got p={p}, q={q}")]
    BadSpec { p: usize, q: usize },
    #[error("need at least {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("series has no variation")]
    DegenerateSeries,
    #[error("conditional variance path contains non-positive values")]
    NonPositiveVariance,
    #[error("parameters imply a nonstationary process (persistence {persistence})")]
    NonStationary { persistence: f64 },
    #[error("invalid parameters: alpha0 must be positive and coefficients nonnegative")]
    BadParams,
    #[error("constant matrix must be upper triangular")]
    NotUpperTriangular,
    #[error("panel has {actual} assets, cap is {cap}")]
    TooManyAssets { actual: usize, cap: usize },
    #[error(transparent)]
    Panel(#[from] crate::panel::PanelError),
}
