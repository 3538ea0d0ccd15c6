//! Dependency-network toolkit for panels of asset prices.
//!
//! The pipeline goes: price panel -> log returns -> dependence matrix
//! (Pearson, weighted, partial, rank) -> filtered network (threshold, MST,
//! PMFG, DBHT) or model-based network (GARCH/DCC, Granger, robust pairwise
//! regression, variance-decomposition spillovers).

pub mod correlation;
pub mod econnet;
pub mod filtergraph;
pub mod matrix;
pub mod panel;
pub mod spectrum;
pub mod spillover;
pub mod volatility;

pub use matrix::{MatrixKind, SquareDependencyMatrix, WindowInfo};
pub use panel::{PricePanel, ReturnsPanel};
