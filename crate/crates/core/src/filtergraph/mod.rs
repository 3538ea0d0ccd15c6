//! Topological filtering of dependence matrices: threshold graphs, MST,
//! PMFG, hierarchical dendrograms, and DBHT clustering.

mod dbht;
mod hierarchical;
mod mst;
pub mod planarity;
mod pmfg;

pub use dbht::dbht;
pub use hierarchical::{cut_dendrogram, hierarchical, Dendrogram, Linkage, Merge};
pub use mst::mst;
pub use pmfg::pmfg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{MatrixError, MatrixKind, SquareDependencyMatrix};
use crate::panel::AssetLabel;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("quantile {0} must lie in (0, 1)")]
    BadQuantile(f64),
    #[error("need at least {required} nodes, got {actual}")]
    TooFewNodes { required: usize, actual: usize },
    #[error("non-finite distance at ({i}, {j})")]
    BadDistance { i: usize, j: usize },
    #[error("missing label for asset {0}")]
    MissingLabel(String),
    #[error("planarity violated during {stage}")]
    PlanarityViolated { stage: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("serialization failed: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Threshold,
    Mst,
    Pmfg,
    Fevd,
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Filtered network over the assets of a dependence matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilteredGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub directed: bool,
    pub provenance: Provenance,
    pub genus: u32,
}

impl FilteredGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn adjacency_sets(&self) -> Vec<std::collections::BTreeSet<usize>> {
        let mut adj = vec![std::collections::BTreeSet::new(); self.n()];
        for e in &self.edges {
            adj[e.i].insert(e.j);
            if !self.directed {
                adj[e.j].insert(e.i);
            }
        }
        adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|e| (e.i == a && e.j == b) || (!self.directed && e.i == b && e.j == a))
    }

    /// Edge-list CSV: i, j, weight (asset identifiers, not indices).
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<(), GraphError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["source", "target", "weight"])
            .map_err(|e| GraphError::Io(e.to_string()))?;
        for e in &self.edges {
            wtr.write_record([
                self.nodes[e.i].as_str(),
                self.nodes[e.j].as_str(),
                &format!("{:.12e}", e.weight),
            ])
            .map_err(|er| GraphError::Io(er.to_string()))?;
        }
        wtr.flush().map_err(|e| GraphError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes,
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "source": self.nodes[e.i],
                "target": self.nodes[e.j],
                "weight": e.weight,
            })).collect::<Vec<_>>(),
            "directed": self.directed,
            "provenance": self.provenance,
            "genus": self.genus,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let (kind, arrow) = if self.directed {
            ("digraph", "->")
        } else {
            ("graph", "--")
        };
        out.push_str(&format!("{kind} g {{\n"));
        for node in &self.nodes {
            out.push_str(&format!("  \"{node}\";\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" {arrow} \"{}\" [weight={:.6}];\n",
                self.nodes[e.i], self.nodes[e.j], e.weight
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Node partition produced by a clustering method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    /// asset -> cluster id (0-based, dense).
    pub assignment: BTreeMap<String, usize>,
    pub n_clusters: usize,
    pub method: ClusterMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMethod {
    DendrogramCut,
    Dbht,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    /// Quantile of the off-diagonal correlation distribution, in (0, 1).
    Quantile(f64),
}

/// Graph with an edge wherever the correlation exceeds the threshold;
/// weights are |C_ij|.
pub fn threshold_graph(
    matrix: &SquareDependencyMatrix,
    threshold: Threshold,
) -> Result<FilteredGraph, GraphError> {
    matrix.expect_kind(MatrixKind::Correlation)?;
    let n = matrix.n();
    let cut = match threshold {
        Threshold::Absolute(v) => v,
        Threshold::Quantile(q) => {
            if !(q > 0.0 && q < 1.0) {
                return Err(GraphError::BadQuantile(q));
            }
            let mut offdiag: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in 0..i {
                    offdiag.push(matrix.values[[i, j]]);
                }
            }
            offdiag.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let pos = q * (offdiag.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            offdiag[lo] * (1.0 - frac) + offdiag[hi] * frac
        }
    };
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = matrix.values[[i, j]];
            if c > cut {
                edges.push(Edge {
                    i,
                    j,
                    weight: c.abs(),
                });
            }
        }
    }
    Ok(FilteredGraph {
        nodes: matrix.assets.clone(),
        edges,
        directed: false,
        provenance: Provenance::Threshold,
        genus: 0,
    })
}

/// Per-cluster sector shares; fractions sum to one within each cluster.
pub fn cluster_composition(
    clustering: &Clustering,
    labels: &BTreeMap<String, AssetLabel>,
) -> Result<BTreeMap<usize, BTreeMap<String, f64>>, GraphError> {
    let mut counts: BTreeMap<usize, BTreeMap<String, usize>> = BTreeMap::new();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for (asset, &cluster) in &clustering.assignment {
        let label = labels
            .get(asset)
            .ok_or_else(|| GraphError::MissingLabel(asset.clone()))?;
        *counts
            .entry(cluster)
            .or_default()
            .entry(label.sector.clone())
            .or_default() += 1;
        *sizes.entry(cluster).or_default() += 1;
    }
    let mut out = BTreeMap::new();
    for (cluster, sector_counts) in counts {
        let size = sizes[&cluster] as f64;
        out.insert(
            cluster,
            sector_counts
                .into_iter()
                .map(|(s, c)| (s, c as f64 / size))
                .collect(),
        );
    }
    Ok(out)
}

/// Connected components of an undirected edge set over n nodes.
#[cfg(test)]
pub(crate) fn components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
