use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::{MatrixKind, SquareDependencyMatrix};

use super::{ClusterMethod, Clustering, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Average,
}

/// One agglomeration step. Leaves carry ids 0..n-1; the cluster formed by
/// merge k gets id n + k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dendrogram {
    pub assets: Vec<String>,
    pub merges: Vec<Merge>,
    pub linkage: Linkage,
}

impl Dendrogram {
    /// Merge-list CSV: left, right, height, size.
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<(), GraphError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["left", "right", "height", "size"])
            .map_err(|e| GraphError::Io(e.to_string()))?;
        for m in &self.merges {
            wtr.write_record([
                m.left.to_string(),
                m.right.to_string(),
                format!("{:.12e}", m.height),
                m.size.to_string(),
            ])
            .map_err(|e| GraphError::Io(e.to_string()))?;
        }
        wtr.flush().map_err(|e| GraphError::Io(e.to_string()))
    }
}

/// Agglomerative clustering of a distance matrix; n-1 merges.
pub fn hierarchical(
    matrix: &SquareDependencyMatrix,
    linkage: Linkage,
) -> Result<Dendrogram, GraphError> {
    matrix.expect_kind(MatrixKind::Distance)?;
    let n = matrix.n();
    if n < 2 {
        return Err(GraphError::TooFewNodes {
            required: 2,
            actual: n,
        });
    }
    // active clusters: (id, members); distances kept in a mutable map keyed
    // by unordered id pair
    let mut active: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut dist: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            dist.insert((i, j), matrix.values[[i, j]]);
        }
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        // closest active pair; ties broken by (min id, max id)
        let mut best: Option<(f64, usize, usize)> = None;
        for ai in 0..active.len() {
            for bi in ai + 1..active.len() {
                let (a, b) = (active[ai].0, active[bi].0);
                let d = dist[&key(a, b)];
                let better = match best {
                    None => true,
                    Some((bd, ba, bb)) => {
                        d < bd || (d == bd && key(a, b) < key(ba, bb))
                    }
                };
                if better {
                    best = Some((d, a, b));
                }
            }
        }
        let (height, a, b) = best.unwrap();
        let (amembers, bmembers): (Vec<usize>, Vec<usize>) = {
            let am = active.iter().find(|(id, _)| *id == a).unwrap().1.clone();
            let bm = active.iter().find(|(id, _)| *id == b).unwrap().1.clone();
            (am, bm)
        };
        let new_id = n + step;
        let (na, nb) = (amembers.len() as f64, bmembers.len() as f64);
        for &(c, _) in &active {
            if c == a || c == b {
                continue;
            }
            let (da, db) = (dist[&key(a, c)], dist[&key(b, c)]);
            let d = match linkage {
                Linkage::Single => da.min(db),
                Linkage::Average => (na * da + nb * db) / (na + nb),
            };
            dist.insert(key(new_id, c), d);
        }
        active.retain(|(id, _)| *id != a && *id != b);
        let mut members = amembers;
        members.extend(bmembers);
        merges.push(Merge {
            left: a.min(b),
            right: a.max(b),
            height,
            size: members.len(),
        });
        active.push((new_id, members));
    }
    Ok(Dendrogram {
        assets: matrix.assets.clone(),
        merges,
        linkage,
    })
}

/// Partition obtained by stopping the agglomeration at k clusters.
/// Cluster ids are dense and ordered by each cluster's smallest leaf.
pub fn cut_dendrogram(dendrogram: &Dendrogram, k: usize) -> Result<Clustering, GraphError> {
    let n = dendrogram.assets.len();
    if k == 0 || k > n {
        return Err(GraphError::TooFewNodes {
            required: 1,
            actual: k,
        });
    }
    let mut members: BTreeMap<usize, Vec<usize>> = (0..n).map(|i| (i, vec![i])).collect();
    for (step, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        let left = members.remove(&m.left).expect("merge references live cluster");
        let mut right = members.remove(&m.right).expect("merge references live cluster");
        let mut all = left;
        all.append(&mut right);
        all.sort_unstable();
        members.insert(n + step, all);
    }
    let mut clusters: Vec<Vec<usize>> = members.into_values().collect();
    clusters.sort_by_key(|c| c[0]);
    let mut assignment = BTreeMap::new();
    for (cid, cluster) in clusters.iter().enumerate() {
        for &leaf in cluster {
            assignment.insert(dendrogram.assets[leaf].clone(), cid);
        }
    }
    Ok(Clustering {
        assignment,
        n_clusters: k,
        method: ClusterMethod::DendrogramCut,
    })
}
