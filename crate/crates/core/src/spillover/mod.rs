//! Vector-autoregression estimation and generalized forecast-error
//! variance-decomposition (FEVD) spillover networks.

mod fevd;
mod network;
mod var;

use thiserror::Error;

pub use fevd::{connectedness, gfevd, Connectedness, FevdMatrix};
pub use network::{rolling_spillover, spillover_network, DiagonalMode, WindowTotal};
pub use var::{ma_coefficients, var_fit, VarFit, VAR_MAX_ASSETS};

#[derive(Debug, Error)]
pub enum SpilloverError {
    #[error("lag order must be at least 1")]
    BadLagOrder,
    #[error("panel has {actual} assets, cap is {cap}")]
    TooManyAssets { actual: usize, cap: usize },
    #[error("need more than {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("horizon must be at least 1")]
    BadHorizon,
    #[error("regressors are collinear")]
    SingularRegressors,
    #[error("residual variance of variable {0} is zero")]
    ZeroResidualVariance(usize),
    #[error("fit is unstable (spectral radius {0})")]
    UnstableFit(f64),
    #[error("window of {delta_t} with step {step} does not fit the sample")]
    BadWindow { delta_t: usize, step: usize },
}
