use crate::matrix::{MatrixKind, SquareDependencyMatrix};

use super::{Edge, FilteredGraph, GraphError, Provenance};

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if x and y were already in the same set.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        match self.rank[rx].cmp(&self.rank[ry]) {
            std::cmp::Ordering::Less => self.parent[rx] = ry,
            std::cmp::Ordering::Greater => self.parent[ry] = rx,
            std::cmp::Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
            }
        }
        true
    }
}

/// Off-diagonal upper-triangle edges sorted ascending by
/// (weight, min index, max index); the index tie-break makes the result
/// deterministic under ties.
pub(crate) fn sorted_candidate_edges(matrix: &SquareDependencyMatrix) -> Vec<Edge> {
    let n = matrix.n();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push(Edge {
                i,
                j,
                weight: matrix.values[[i, j]],
            });
        }
    }
    edges.sort_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .unwrap()
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    edges
}

/// Minimum spanning tree of a distance matrix (Kruskal).
pub fn mst(matrix: &SquareDependencyMatrix) -> Result<FilteredGraph, GraphError> {
    matrix.expect_kind(MatrixKind::Distance)?;
    let n = matrix.n();
    if n < 2 {
        return Err(GraphError::TooFewNodes {
            required: 2,
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
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    for e in sorted_candidate_edges(matrix) {
        if uf.union(e.i, e.j) {
            edges.push(e);
            if edges.len() == n - 1 {
                break;
            }
        }
    }
    Ok(FilteredGraph {
        nodes: matrix.assets.clone(),
        edges,
        directed: false,
        provenance: Provenance::Mst,
        genus: 0,
    })
}
