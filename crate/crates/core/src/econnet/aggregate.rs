use std::collections::BTreeMap;

use crate::filtergraph::{Edge, FilteredGraph};
use crate::panel::AssetLabel;

use super::EconError;

/// Collapses an asset-level network to (country, sector) groups. The weight
/// between two groups is the mean over all constituent asset pairs, counting
/// absent links as zero, so sparse connections dilute the group weight.
/// Self-loops (within-group averages) are dropped.
pub fn aggregate_network(
    net: &FilteredGraph,
    labels: &BTreeMap<String, AssetLabel>,
) -> Result<FilteredGraph, EconError> {
    let mut keys = Vec::with_capacity(net.n());
    for node in &net.nodes {
        let label = labels
            .get(node)
            .ok_or_else(|| EconError::MissingLabel(node.clone()))?;
        keys.push(format!("{}:{}", label.country, label.sector));
    }
    // group ids in lexicographic key order, independent of node order
    let group_ids: BTreeMap<String, usize> = {
        let sorted: std::collections::BTreeSet<&String> = keys.iter().collect();
        sorted
            .into_iter()
            .enumerate()
            .map(|(id, k)| (k.clone(), id))
            .collect()
    };
    let group_of: Vec<usize> = keys.iter().map(|k| group_ids[k]).collect();
    let n_groups = group_ids.len();
    let mut size = vec![0usize; n_groups];
    for &g in &group_of {
        size[g] += 1;
    }

    // sum of observed weights per ordered group pair
    let mut sums: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in &net.edges {
        let (a, b) = (group_of[e.i], group_of[e.j]);
        if a == b {
            continue;
        }
        let key = if net.directed || a < b { (a, b) } else { (b, a) };
        *sums.entry(key).or_default() += e.weight;
    }

    let mut edges = Vec::new();
    for ((a, b), sum) in sums {
        // each cross-group asset pair contributes one potential link
        // (one per direction when the network is directed)
        let pairs = (size[a] * size[b]) as f64;
        let weight = sum / pairs;
        if weight > 0.0 {
            edges.push(Edge { i: a, j: b, weight });
        }
    }
    let nodes: Vec<String> = {
        let mut names = vec![String::new(); n_groups];
        for (name, &id) in &group_ids {
            names[id] = name.clone();
        }
        names
    };
    Ok(FilteredGraph {
        nodes,
        edges,
        directed: net.directed,
        provenance: net.provenance,
        genus: 0,
    })
}
