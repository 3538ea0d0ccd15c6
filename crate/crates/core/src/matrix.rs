//! Square dependence matrices shared by all network builders.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Correlation,
    Covariance,
    Distance,
    PValue,
    Fevd,
}

/// Window descriptor attached to matrices computed on a sub-sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub start: usize,
    pub end: usize,
    pub delta_t: usize,
    /// Characteristic time of exponential weights, if any.
    pub theta: Option<f64>,
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("asset list length {assets} does not match matrix dimension {dim}")]
    AssetMismatch { assets: usize, dim: usize },
    #[error("{kind:?} matrix violates its invariant: {detail}")]
    InvariantViolation { kind: MatrixKind, detail: String },
    #[error("expected a {expected:?} matrix, got {got:?}")]
    KindMismatch { expected: MatrixKind, got: MatrixKind },
    #[error("serialization failed: {0}")]
    Io(String),
}

/// N x N dependence matrix with a kind tag. Correlation/covariance/distance
/// kinds are symmetric; p-value and FEVD kinds may be directed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquareDependencyMatrix {
    pub kind: MatrixKind,
    pub assets: Vec<String>,
    pub values: Array2<f64>,
    pub window: Option<WindowInfo>,
}

const SYM_TOL: f64 = 1e-9;

impl SquareDependencyMatrix {
    pub fn new(
        kind: MatrixKind,
        assets: Vec<String>,
        values: Array2<f64>,
        window: Option<WindowInfo>,
    ) -> Result<Self, MatrixError> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(MatrixError::NotSquare { rows, cols });
        }
        if assets.len() != rows {
            return Err(MatrixError::AssetMismatch {
                assets: assets.len(),
                dim: rows,
            });
        }
        let m = Self {
            kind,
            assets,
            values,
            window,
        };
        m.check_invariants()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    fn check_invariants(&self) -> Result<(), MatrixError> {
        let n = self.n();
        let v = &self.values;
        let fail = |detail: String| MatrixError::InvariantViolation {
            kind: self.kind,
            detail,
        };
        for i in 0..n {
            for j in 0..n {
                if !v[[i, j]].is_finite() {
                    return Err(fail(format!("non-finite entry at ({i}, {j})")));
                }
            }
        }
        match self.kind {
            MatrixKind::Correlation => {
                for i in 0..n {
                    if (v[[i, i]] - 1.0).abs() > SYM_TOL {
                        return Err(fail(format!("diagonal entry {} at {i}", v[[i, i]])));
                    }
                    for j in 0..i {
                        if (v[[i, j]] - v[[j, i]]).abs() > SYM_TOL {
                            return Err(fail(format!("asymmetry at ({i}, {j})")));
                        }
                        if v[[i, j]].abs() > 1.0 + SYM_TOL {
                            return Err(fail(format!("entry {} out of [-1,1]", v[[i, j]])));
                        }
                    }
                }
            }
            MatrixKind::Covariance => {
                for i in 0..n {
                    for j in 0..i {
                        if (v[[i, j]] - v[[j, i]]).abs() > SYM_TOL * v[[i, i]].abs().max(1.0) {
                            return Err(fail(format!("asymmetry at ({i}, {j})")));
                        }
                    }
                }
            }
            MatrixKind::Distance => {
                for i in 0..n {
                    if v[[i, i]].abs() > SYM_TOL {
                        return Err(fail(format!("non-zero diagonal at {i}")));
                    }
                    for j in 0..i {
                        if (v[[i, j]] - v[[j, i]]).abs() > SYM_TOL {
                            return Err(fail(format!("asymmetry at ({i}, {j})")));
                        }
                        if v[[i, j]] < -SYM_TOL || v[[i, j]] > 2.0 + SYM_TOL {
                            return Err(fail(format!("entry {} out of [0,2]", v[[i, j]])));
                        }
                    }
                }
            }
            MatrixKind::PValue => {
                for i in 0..n {
                    for j in 0..n {
                        if !(-SYM_TOL..=1.0 + SYM_TOL).contains(&v[[i, j]]) {
                            return Err(fail(format!("p-value {} out of [0,1]", v[[i, j]])));
                        }
                    }
                }
            }
            MatrixKind::Fevd => {
                for i in 0..n {
                    for j in 0..n {
                        if v[[i, j]] < -SYM_TOL {
                            return Err(fail(format!("negative share {} at ({i},{j})", v[[i, j]])));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn expect_kind(&self, expected: MatrixKind) -> Result<(), MatrixError> {
        if self.kind != expected {
            return Err(MatrixError::KindMismatch {
                expected,
                got: self.kind,
            });
        }
        Ok(())
    }

    /// Dense CSV: header row of asset ids, one row per asset.
    pub fn to_csv<W: std::io::Write>(&self, w: W) -> Result<(), MatrixError> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["asset".to_string()];
        header.extend(self.assets.iter().cloned());
        wtr.write_record(&header)
            .map_err(|e| MatrixError::Io(e.to_string()))?;
        for i in 0..self.n() {
            let mut row = vec![self.assets[i].clone()];
            row.extend((0..self.n()).map(|j| format!("{:.12e}", self.values[[i, j]])));
            wtr.write_record(&row)
                .map_err(|e| MatrixError::Io(e.to_string()))?;
        }
        wtr.flush().map_err(|e| MatrixError::Io(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.values[[i, j]]).collect())
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "assets": self.assets,
            "values": rows,
            "window": self.window,
        })
    }
}
