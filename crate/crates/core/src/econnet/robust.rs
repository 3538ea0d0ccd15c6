use crate::filtergraph::{Edge, FilteredGraph, Provenance};
use crate::panel::ReturnsPanel;

use super::granger::{Direction, PairEdge, MIN_PAIR_LENGTH};
use super::ols::{ols, wls, LsFit};
use super::{degarch_panel, DegarchedSeries, EconError};

/// Default degrees of freedom for the error-distribution weights.
pub const DEFAULT_NU: f64 = 5.0;

const IRLS_MAX_ITER: usize = 100;
const IRLS_TOL: f64 = 1e-10;

/// Undirected significance network with p-value-derived weights.
#[derive(Debug, Clone)]
pub struct PValueNetwork {
    pub graph: FilteredGraph,
    pub gamma: f64,
    /// one-sided p-value per edge, aligned with graph.edges
    pub p_values: Vec<f64>,
}

/// Iteratively reweighted least squares with Student-t weights
/// w = (nu+1) / (nu + e^2/s^2), the standard robust-regression scheme for
/// heavy-tailed errors. Standard errors come from the M-estimation
/// sandwich, so the tests stay calibrated whether or not the errors really
/// are t-distributed.
fn irls_t(y: &[f64], columns: &[Vec<f64>], nu: f64) -> Result<LsFit, EconError> {
    let mut fit = ols(y, columns)?;
    let mut scale = fit.sigma2;
    for _ in 0..IRLS_MAX_ITER {
        let weights: Vec<f64> = fit
            .residuals
            .iter()
            .map(|&e| (nu + 1.0) / (nu + e * e / scale))
            .collect();
        let next = wls(y, columns, &weights)?;
        // maximum-likelihood scale update for the t model
        let n = y.len() as f64;
        let new_scale = next
            .residuals
            .iter()
            .zip(&weights)
            .map(|(&e, &w)| w * e * e)
            .sum::<f64>()
            / n;
        let delta = fit
            .coefs
            .iter()
            .zip(&next.coefs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        fit = next;
        scale = new_scale;
        if delta < IRLS_TOL {
            break;
        }
    }
    sandwich_errors(&mut fit, columns, nu, scale);
    Ok(fit)
}

/// Replaces the naive weighted-least-squares standard errors with the
/// M-estimation sandwich B^-1 M B^-1, where psi(e) = w(e) e is the score
/// of the t model, B = sum psi'(e) x x' and M = sum psi(e)^2 x x'. The
/// naive errors understate the variance when the error distribution does
/// not match the weight function (e.g. Gaussian errors), which inflates
/// the false-positive rate.
fn sandwich_errors(fit: &mut LsFit, columns: &[Vec<f64>], nu: f64, scale: f64) {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let k = columns.len();
    let t_len = fit.residuals.len();
    if scale <= 0.0 || !scale.is_finite() {
        return; // exact fit: keep the degenerate p-values from wls
    }
    let mut bread = nalgebra::DMatrix::<f64>::zeros(k, k);
    let mut meat = nalgebra::DMatrix::<f64>::zeros(k, k);
    for t in 0..t_len {
        let e = fit.residuals[t];
        let u = e * e / scale;
        let w = (nu + 1.0) / (nu + u);
        let psi = w * e;
        let dpsi = w * (nu - u) / (nu + u);
        for a in 0..k {
            for b in a..k {
                let xx = columns[a][t] * columns[b][t];
                bread[(a, b)] += dpsi * xx;
                meat[(a, b)] += psi * psi * xx;
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            bread[(a, b)] = bread[(b, a)];
            meat[(a, b)] = meat[(b, a)];
        }
    }
    let Some(bread_inv) = bread.try_inverse() else {
        return; // keep the naive errors if the bread matrix degenerates
    };
    let cov: nalgebra::DMatrix<f64> = &bread_inv * meat * bread_inv.transpose();
    let dist = StudentsT::new(0.0, 1.0, fit.dof as f64).unwrap();
    for a in 0..k {
        let var = cov[(a, a)];
        if !(var > 0.0) {
            continue;
        }
        fit.stderrs[a] = var.sqrt();
        let t_stat = fit.coefs[a] / fit.stderrs[a];
        fit.p_values[a] = 2.0 * (1.0 - dist.cdf(t_stat.abs()));
    }
}

/// Contemporaneous robust regression of each series on the other. The first
/// edge regresses i on j, the second j on i; p-values are one-sided for a
/// positive slope.
pub fn robust_pair(
    r_i: &DegarchedSeries,
    r_j: &DegarchedSeries,
    nu: f64,
) -> Result<(PairEdge, PairEdge), EconError> {
    let t_len = r_i.len();
    if r_j.len() != t_len {
        return Err(EconError::LengthMismatch {
            expected: t_len,
            actual: r_j.len(),
        });
    }
    if t_len < MIN_PAIR_LENGTH {
        return Err(EconError::TooShort {
            required: MIN_PAIR_LENGTH,
            actual: t_len,
        });
    }
    let ones = vec![1.0; t_len];
    let fit_ij = irls_t(r_i.values(), &[ones.clone(), r_j.values().to_vec()], nu)?;
    let fit_ji = irls_t(r_j.values(), &[ones, r_i.values().to_vec()], nu)?;
    Ok((
        PairEdge {
            i: 0,
            j: 1,
            beta: fit_ij.coefs[1],
            p_value: fit_ij.p_positive(1),
            direction: Direction::Undirected,
        },
        PairEdge {
            i: 0,
            j: 1,
            beta: fit_ji.coefs[1],
            p_value: fit_ji.p_positive(1),
            direction: Direction::Undirected,
        },
    ))
}

/// Undirected network on an internally volatility-filtered panel: an edge
/// wherever either direction's slope is significantly positive at gamma
/// (strict), weighted by (gamma - p) and normalized so the largest weight
/// is 1.
pub fn robust_pair_network(
    panel: &ReturnsPanel,
    gamma: f64,
    nu: f64,
) -> Result<PValueNetwork, EconError> {
    use rayon::prelude::*;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EconError::BadThreshold(gamma));
    }
    let filtered = degarch_panel(panel)?;
    let n = filtered.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let results: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ij, ji) = robust_pair(&filtered[i], &filtered[j], nu)?;
            // either direction significant: keep the smaller p-value
            Ok((i, j, ij.p_value.min(ji.p_value)))
        })
        .collect::<Result<_, EconError>>()?;
    let mut edges = Vec::new();
    let mut p_values = Vec::new();
    for (i, j, p) in results {
        if p < gamma {
            edges.push(Edge {
                i,
                j,
                weight: gamma - p,
            });
            p_values.push(p);
        }
    }
    let max_w = edges.iter().map(|e| e.weight).fold(0.0, f64::max);
    if max_w > 0.0 {
        for e in &mut edges {
            e.weight /= max_w;
        }
    }
    Ok(PValueNetwork {
        graph: FilteredGraph {
            nodes: panel.assets.clone(),
            edges,
            directed: false,
            provenance: Provenance::Regression,
            genus: 0,
        },
        gamma,
        p_values,
    })
}
