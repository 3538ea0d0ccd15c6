//! Command-line pipeline: price panel -> returns -> dependence matrices ->
//! filtered networks, volatility models, and spillover measures, all written
//! as flat CSV/JSON artifacts plus a reproducibility manifest.

mod commands;
mod manifest;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Validation failures exit 1; numerical non-convergence exits 2 after
/// writing partial artifacts with their flags.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    NonConvergence(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}
validation_from!(
    assetnet::panel::PanelError,
    assetnet::correlation::CorrelationError,
    assetnet::spectrum::SpectrumError,
    assetnet::filtergraph::GraphError,
    assetnet::volatility::VolatilityError,
    assetnet::econnet::EconError,
    assetnet::spillover::SpilloverError,
    assetnet::matrix::MatrixError,
    std::io::Error
);

pub type CliResult = Result<(), CliError>;

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// input panel CSV: date column plus one column per asset
    #[arg(long)]
    pub input: PathBuf,
    /// treat the input as log returns instead of prices
    #[arg(long, default_value_t = false)]
    pub returns: bool,
    /// sidecar label CSV with rows asset,sector,country
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// seed for any stochastic stage
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// worker threads for pairwise/window stages
    #[arg(long)]
    pub threads: Option<usize>,
    /// output directory (created if absent)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Parser, Debug)]
#[command(name = "assetnet", version, about = "Dependency networks for asset return panels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Log returns plus distributional plot data (ACF, CCDF)
    Returns(commands::ReturnsArgs),
    /// Dependence matrix (Pearson, Spearman, or exponentially weighted)
    Corr(commands::CorrArgs),
    /// Eigenvalue spectrum against the i.i.d. random-matrix bulk
    Spectrum(commands::SpectrumArgs),
    /// Minimum spanning tree of the correlation distances
    Mst(commands::GraphArgs),
    /// Planar maximally filtered graph of the correlation distances
    Pmfg(commands::GraphArgs),
    /// Clustering from the planar graph's topology
    Dbht(commands::GraphArgs),
    /// Hierarchical dendrogram and a k-cluster cut
    Cluster(commands::ClusterArgs),
    /// Univariate conditional-volatility fits and filtered returns
    Garch(commands::GarchArgs),
    /// Dynamic conditional correlations
    Dcc(commands::DccArgs),
    /// Directed lagged-influence network
    GrangerNet(commands::GrangerArgs),
    /// Undirected robust-regression significance network
    PairNet(commands::PairArgs),
    /// Forecast-error variance-decomposition spillovers
    Spillover(commands::SpilloverArgs),
    /// Synthetic panel generator for the bundled test models
    Synth(synth::SynthArgs),
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Returns(a) => commands::run_returns(a),
        Command::Corr(a) => commands::run_corr(a),
        Command::Spectrum(a) => commands::run_spectrum(a),
        Command::Mst(a) => commands::run_mst(a),
        Command::Pmfg(a) => commands::run_pmfg(a),
        Command::Dbht(a) => commands::run_dbht(a),
        Command::Cluster(a) => commands::run_cluster(a),
        Command::Garch(a) => commands::run_garch(a),
        Command::Dcc(a) => commands::run_dcc(a),
        Command::GrangerNet(a) => commands::run_granger(a),
        Command::PairNet(a) => commands::run_pair(a),
        Command::Spillover(a) => commands::run_spillover(a),
        Command::Synth(a) => synth::run_synth(a),
    }
}

pub fn init_threads(threads: Option<usize>) -> CliResult {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Validation(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::NonConvergence(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
