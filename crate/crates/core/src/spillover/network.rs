use crate::filtergraph::{Edge, FilteredGraph, Provenance};
use crate::panel::ReturnsPanel;

use super::fevd::{connectedness, gfevd, FevdMatrix};
use super::var::var_fit;
use super::SpilloverError;

/// Self-loop convention for the adjacency view of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalMode {
    /// self-loop carries the own share d_ii
    OwnShare,
    /// self-loop carries the sum of the row's cross shares
    CrossSum,
}

/// Directed network view: edge j -> i with weight d_ij (j's shocks explain
/// part of i's forecast-error variance).
pub fn spillover_network(fevd: &FevdMatrix, diagonal_mode: DiagonalMode) -> FilteredGraph {
    let n = fevd.n();
    let mut edges = Vec::new();
    for i in 0..n {
        let diag = match diagonal_mode {
            DiagonalMode::OwnShare => fevd.normalized[[i, i]],
            DiagonalMode::CrossSum => {
                (0..n).filter(|&j| j != i).map(|j| fevd.normalized[[i, j]]).sum()
            }
        };
        if diag > 0.0 {
            edges.push(Edge {
                i,
                j: i,
                weight: diag,
            });
        }
        for j in 0..n {
            let w = fevd.normalized[[i, j]];
            if i != j && w > 0.0 {
                edges.push(Edge { i: j, j: i, weight: w });
            }
        }
    }
    FilteredGraph {
        nodes: fevd.assets.clone(),
        edges,
        directed: true,
        provenance: Provenance::Fevd,
        genus: 0,
    }
}

/// Total connectedness per window; None marks a window whose fit was
/// unstable and is excluded rather than silently reported.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowTotal {
    /// timestamp of the last observation in the window
    pub timestamp: String,
    pub total: Option<f64>,
}

/// Full pipeline over rolling windows of width delta_t advancing by step.
pub fn rolling_spillover(
    panel: &ReturnsPanel,
    p: usize,
    horizon: usize,
    delta_t: usize,
    step: usize,
) -> Result<Vec<WindowTotal>, SpilloverError> {
    let t_len = panel.returns.dim().1;
    if delta_t == 0 || step == 0 || delta_t > t_len {
        return Err(SpilloverError::BadWindow { delta_t, step });
    }
    use rayon::prelude::*;
    let starts: Vec<usize> = (0..=t_len - delta_t).step_by(step).collect();
    starts
        .par_iter()
        .map(|&start| {
            let end = start + delta_t;
            let window = ReturnsPanel {
                assets: panel.assets.clone(),
                timestamps: panel.timestamps[start..end].to_vec(),
                returns: panel
                    .returns
                    .slice(ndarray::s![.., start..end])
                    .to_owned(),
                labels: None,
            };
            let fit = var_fit(&window, p)?;
            let total = if fit.is_stable() {
                Some(connectedness(&gfevd(&fit, horizon)?).total)
            } else {
                None
            };
            Ok(WindowTotal {
                timestamp: panel.timestamps[end - 1].clone(),
                total,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::var::testutil::simulate_var;
    use super::*;
    use ndarray::{array, Array2};

    fn fevd_for(a: Array2<f64>, omega: Array2<f64>) -> FevdMatrix {
        let n = omega.dim().0;
        let fit = super::super::var::VarFit {
            assets: (0..n).map(|i| format!("A{i}")).collect(),
            p: 1,
            spectral_radius: 0.5,
            intercept: vec![0.0; n],
            coefs: vec![a],
            omega,
        };
        gfevd(&fit, 10).unwrap()
    }

    #[test]
    fn identity_decomposition_has_no_cross_edges() {
        let fevd = fevd_for(Array2::zeros((3, 3)), Array2::eye(3));
        let g = spillover_network(&fevd, DiagonalMode::OwnShare);
        assert!(g.edges.iter().all(|e| e.i == e.j));
        // own-share self loops carry the full unit weight
        for e in &g.edges {
            approx::assert_abs_diff_eq!(e.weight, 1.0, epsilon = 1e-12);
        }
        let g2 = spillover_network(&fevd, DiagonalMode::CrossSum);
        assert!(g2.edges.is_empty());
    }

    #[test]
    fn own_share_rows_sum_to_one() {
        let a = array![[0.4, 0.2], [0.3, 0.3]];
        let omega = array![[1.0, 0.3], [0.3, 0.9]];
        let fevd = fevd_for(a, omega);
        let g = spillover_network(&fevd, DiagonalMode::OwnShare);
        // incoming weight of node i (edges j -> i plus its self-loop) is the
        // normalized row sum
        for i in 0..2 {
            let sum: f64 = g.edges.iter().filter(|e| e.j == i).map(|e| e.weight).sum();
            approx::assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn asymmetry_is_preserved() {
        let a = array![[0.5, 0.0], [0.4, 0.2]];
        let fevd = fevd_for(a, Array2::eye(2));
        let g = spillover_network(&fevd, DiagonalMode::OwnShare);
        let weight = |from: usize, to: usize| {
            g.edges
                .iter()
                .find(|e| e.i == from && e.j == to && from != to)
                .map(|e| e.weight)
        };
        assert!(weight(0, 1).unwrap() > 0.2);
        assert!(weight(1, 0).is_none());
    }

    #[test]
    fn rolling_is_flat_for_stationary_generator() {
        let a = array![[0.4, 0.2], [0.2, 0.4]];
        let panel = simulate_var(&[a], &Array2::eye(2), 4000, 200);
        let series = rolling_spillover(&panel, 1, 10, 1000, 500).unwrap();
        let values: Vec<f64> = series.iter().map(|w| w.total.unwrap()).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        for v in &values {
            assert!((v - mean).abs() < 0.05, "window total {v} vs mean {mean}");
        }
    }

    #[test]
    fn regime_switch_shifts_the_level() {
        // coupling switched on halfway through the sample
        let quiet = simulate_var(&[array![[0.3, 0.0], [0.0, 0.3]]], &Array2::eye(2), 2000, 201);
        let coupled = simulate_var(&[array![[0.3, 0.4], [0.4, 0.3]]], &Array2::eye(2), 2000, 202);
        let mut returns = Array2::zeros((2, 4000));
        for t in 0..2000 {
            for i in 0..2 {
                returns[[i, t]] = quiet.returns[[i, t]];
                returns[[i, 2000 + t]] = coupled.returns[[i, t]];
            }
        }
        let panel = ReturnsPanel {
            assets: vec!["A".into(), "B".into()],
            timestamps: (0..4000).map(|t| format!("t{t:05}")).collect(),
            returns,
            labels: None,
        };
        let series = rolling_spillover(&panel, 1, 10, 1000, 1000).unwrap();
        let first = series.first().unwrap().total.unwrap();
        let last = series.last().unwrap().total.unwrap();
        assert!(last > first + 0.1, "first {first} last {last}");
    }

    #[test]
    fn full_width_window_equals_full_sample_total() {
        let a = array![[0.4, 0.1], [0.2, 0.3]];
        let panel = simulate_var(&[a], &Array2::eye(2), 1500, 203);
        let series = rolling_spillover(&panel, 1, 10, 1500, 1).unwrap();
        assert_eq!(series.len(), 1);
        let fit = var_fit(&panel, 1).unwrap();
        let full = connectedness(&gfevd(&fit, 10).unwrap()).total;
        approx::assert_abs_diff_eq!(series[0].total.unwrap(), full, epsilon = 1e-14);
        assert_eq!(series[0].timestamp, panel.timestamps[1499]);
    }

    #[test]
    fn bad_window_rejected() {
        let panel = simulate_var(
            &[Array2::zeros((2, 2))],
            &Array2::eye(2),
            300,
            204,
        );
        assert!(rolling_spillover(&panel, 1, 10, 0, 10).is_err());
        assert!(rolling_spillover(&panel, 1, 10, 500, 10).is_err());
    }
}
