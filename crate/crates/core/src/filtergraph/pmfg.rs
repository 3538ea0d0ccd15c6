use crate::matrix::{MatrixKind, SquareDependencyMatrix};

use super::mst::sorted_candidate_edges;
use super::planarity::{dmp_planar, lr_planar};
use super::{Edge, FilteredGraph, GraphError, Provenance};

/// Planar maximally filtered graph: edges are considered in ascending
/// distance order (ties broken by index) and kept whenever the graph stays
/// planar, until the 3(n-2) planar bound is saturated. The result is
/// re-checked with an embedding-based planarity test that shares no code
/// with the construction-time check.
pub fn pmfg(matrix: &SquareDependencyMatrix) -> Result<FilteredGraph, GraphError> {
    matrix.expect_kind(MatrixKind::Distance)?;
    let n = matrix.n();
    if n < 3 {
        return Err(GraphError::TooFewNodes {
            required: 3,
            actual: n,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            if !matrix.values[[i, j]].is_finite() {
                return Err(GraphError::BadDistance { i, j });
            }
        }
    }
    let target = 3 * (n - 2);
    let mut edges: Vec<Edge> = Vec::with_capacity(target);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(target);
    for e in sorted_candidate_edges(matrix) {
        pairs.push((e.i, e.j));
        if lr_planar(n, &pairs) {
            edges.push(e);
            if edges.len() == target {
                break;
            }
        } else {
            pairs.pop();
        }
    }
    if !dmp_planar(n, &pairs) {
        return Err(GraphError::PlanarityViolated {
            stage: "independent verification".to_string(),
        });
    }
    Ok(FilteredGraph {
        nodes: matrix.assets.clone(),
        edges,
        directed: false,
        provenance: Provenance::Pmfg,
        genus: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::mst::mst;
    use super::super::testutil::random_distance;
    use super::*;

    #[test]
    fn edge_count_is_saturated() {
        for n in [5usize, 8, 15, 30] {
            let d = random_distance(n, n as u64);
            let g = pmfg(&d).unwrap();
            assert_eq!(g.edges.len(), 3 * (n - 2), "n={n}");
        }
    }

    #[test]
    fn contains_mst_under_distinct_weights() {
        for seed in 0..5 {
            let d = random_distance(12, 1000 + seed);
            let tree = mst(&d).unwrap();
            let g = pmfg(&d).unwrap();
            for e in &tree.edges {
                assert!(g.has_edge(e.i, e.j), "missing MST edge {e:?} seed={seed}");
            }
        }
    }

    #[test]
    fn no_five_clique() {
        // K5 is non-planar, so no planar graph contains one
        let d = random_distance(14, 77);
        let g = pmfg(&d).unwrap();
        let adj = g.adjacency_sets();
        let n = g.n();
        for a in 0..n {
            for &b in adj[a].iter().filter(|&&b| b > a) {
                for &c in adj[b].iter().filter(|&&c| c > b && adj[a].contains(&c)) {
                    for &e in adj[c]
                        .iter()
                        .filter(|&&e| e > c && adj[a].contains(&e) && adj[b].contains(&e))
                    {
                        assert!(
                            !adj[e]
                                .iter()
                                .any(|&f| f > e
                                    && adj[a].contains(&f)
                                    && adj[b].contains(&f)
                                    && adj[c].contains(&f)),
                            "5-clique found"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn five_nodes_matches_exhaustive_choice() {
        // with 5 nodes the only obstruction is the full clique itself: the
        // greedy order must keep the 9 cheapest edges and drop the single
        // most expensive one
        for seed in 0..20 {
            let d = random_distance(5, 500 + seed);
            let g = pmfg(&d).unwrap();
            assert_eq!(g.edges.len(), 9);
            let mut all = sorted_candidate_edges(&d);
            let dropped = all.pop().unwrap();
            assert!(!g.has_edge(dropped.i, dropped.j), "seed={seed}");
            for e in &all {
                assert!(g.has_edge(e.i, e.j), "seed={seed}");
            }
        }
    }

    #[test]
    fn rejects_tiny_input() {
        let d = random_distance(2, 1);
        assert!(matches!(pmfg(&d), Err(GraphError::TooFewNodes { .. })));
    }
}
