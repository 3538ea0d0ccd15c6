use serde::{Deserialize, Serialize};

use crate::filtergraph::{Edge, FilteredGraph, Provenance};
use crate::panel::ReturnsPanel;

use super::ols::ols;
use super::{degarch_panel, DegarchedSeries, EconError};

/// Shortest series accepted by the pairwise lag regressions.
pub const MIN_PAIR_LENGTH: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Undirected,
    IToJ,
    JToI,
    Bidirectional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEdge {
    pub i: usize,
    pub j: usize,
    pub beta: f64,
    pub p_value: f64,
    pub direction: Direction,
}

fn demean(series: &[f64]) -> Vec<f64> {
    let m = series.iter().sum::<f64>() / series.len() as f64;
    series.iter().map(|&v| v - m).collect()
}

/// One-lag cross regression: target_t on its own lag and the source's lag,
/// both series demeaned. Returns (slope on the source lag, two-sided p).
fn lag_regression(source: &[f64], target: &[f64]) -> Result<(f64, f64), EconError> {
    let t_len = target.len();
    let y = target[1..].to_vec();
    let own_lag = target[..t_len - 1].to_vec();
    let cross_lag = source[..t_len - 1].to_vec();
    let fit = ols(&y, &[own_lag, cross_lag])?;
    Ok((fit.coefs[1], fit.p_values[1]))
}

/// Tests lagged influence in both directions for one pair. The first edge
/// carries the i->j test (does i's lag explain j?), the second j->i.
pub fn granger_pair(
    r_i: &DegarchedSeries,
    r_j: &DegarchedSeries,
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
    let x = demean(r_i.values());
    let y = demean(r_j.values());
    let (beta_ij, p_ij) = lag_regression(&x, &y)?;
    let (beta_ji, p_ji) = lag_regression(&y, &x)?;
    Ok((
        PairEdge {
            i: 0,
            j: 1,
            beta: beta_ij,
            p_value: p_ij,
            direction: Direction::IToJ,
        },
        PairEdge {
            i: 0,
            j: 1,
            beta: beta_ji,
            p_value: p_ji,
            direction: Direction::JToI,
        },
    ))
}

/// Directed lagged-influence network on an internally volatility-filtered
/// panel. Edge i->j (cause to effect) iff i's lag is significant in j's
/// equation at level alpha; weights are 1 - p.
pub fn granger_network(panel: &ReturnsPanel, alpha: f64) -> Result<FilteredGraph, EconError> {
    use rayon::prelude::*;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EconError::BadThreshold(alpha));
    }
    let filtered = degarch_panel(panel)?;
    let demeaned: Vec<Vec<f64>> = filtered.iter().map(|s| demean(s.values())).collect();
    let n = demeaned.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let results: Vec<(usize, usize, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (beta, p) = lag_regression(&demeaned[i], &demeaned[j])?;
            Ok((i, j, beta, p))
        })
        .collect::<Result<_, EconError>>()?;
    let mut edges = Vec::new();
    for (i, j, _beta, p) in results {
        if p < alpha {
            edges.push(Edge {
                i,
                j,
                weight: 1.0 - p,
            });
        }
    }
    Ok(FilteredGraph {
        nodes: panel.assets.clone(),
        edges,
        directed: true,
        provenance: Provenance::Regression,
        genus: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn series(v: Vec<f64>) -> DegarchedSeries {
        DegarchedSeries::from_prefiltered(v)
    }

    #[test]
    fn planted_lag_is_detected_one_way() {
        let x = noise(1000, 20);
        let e = noise(1000, 21);
        // y_t = 0.5 x_{t-1} + noise
        let mut y = vec![0.0; 1000];
        for t in 1..1000 {
            y[t] = 0.5 * x[t - 1] + e[t];
        }
        let (ij, ji) = granger_pair(&series(x), &series(y)).unwrap();
        assert!(ij.p_value < 1e-3, "x->y p {}", ij.p_value);
        approx::assert_abs_diff_eq!(ij.beta, 0.5, epsilon = 0.1);
        assert!(ji.p_value > 0.01, "spurious y->x p {}", ji.p_value);
    }

    #[test]
    fn independent_pairs_are_calibrated_at_five_percent() {
        let mut hits = 0;
        let trials = 500;
        for s in 0..trials {
            let x = series(noise(200, 1000 + 2 * s));
            let y = series(noise(200, 1001 + 2 * s));
            let (ij, _) = granger_pair(&x, &y).unwrap();
            if ij.p_value < 0.05 {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!((0.03..0.075).contains(&rate), "null edge rate {rate}");
    }

    #[test]
    fn rejects_short_and_mismatched_series() {
        let x = series(noise(20, 1));
        let y = series(noise(20, 2));
        assert!(matches!(
            granger_pair(&x, &y),
            Err(EconError::TooShort { .. })
        ));
        let long = series(noise(50, 3));
        assert!(granger_pair(&x, &long).is_err());
    }

    #[test]
    fn network_recovers_planted_chain() {
        // A -> B -> C with strong lag transfer, homoskedastic noise
        let t_len = 5000;
        let a = noise(t_len, 31);
        let eb = noise(t_len, 32);
        let ec = noise(t_len, 33);
        let mut b = vec![0.0; t_len];
        let mut c = vec![0.0; t_len];
        for t in 1..t_len {
            b[t] = 0.5 * a[t - 1] + eb[t];
            c[t] = 0.5 * b[t - 1] + ec[t];
        }
        let mut returns = Array2::zeros((3, t_len));
        for t in 0..t_len {
            returns[[0, t]] = a[t];
            returns[[1, t]] = b[t];
            returns[[2, t]] = c[t];
        }
        let panel = ReturnsPanel {
            assets: vec!["A".into(), "B".into(), "C".into()],
            timestamps: (0..t_len).map(|t| format!("t{t:05}")).collect(),
            returns,
            labels: None,
        };
        let g = granger_network(&panel, 1e-6).unwrap();
        let got: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(got, vec![(0, 1), (1, 2)]);
        assert!(g.directed);
    }

    #[test]
    fn single_asset_network_is_empty() {
        let panel = ReturnsPanel {
            assets: vec!["A".into()],
            timestamps: (0..300).map(|t| format!("t{t:05}")).collect(),
            returns: Array2::from_shape_vec((1, 300), noise(300, 40)).unwrap(),
            labels: None,
        };
        let g = granger_network(&panel, 0.05).unwrap();
        assert!(g.edges.is_empty());
    }
}
