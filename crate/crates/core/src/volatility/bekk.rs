use ndarray::{Array1, Array2};

use super::VolatilityError;

/// One step of the multivariate covariance recursion
/// H_t = C'C + sum_k A_k'(r r')A_k + sum_k B_k' H_prev B_k.
/// The quadratic-form structure keeps H_t positive semidefinite whenever
/// H_prev is and C'C contributes a PSD base term.
pub fn bekk_step(
    h_prev: &Array2<f64>,
    r_prev: &Array1<f64>,
    c: &Array2<f64>,
    a_list: &[Array2<f64>],
    b_list: &[Array2<f64>],
) -> Result<Array2<f64>, VolatilityError> {
    let n = r_prev.len();
    let square = |m: &Array2<f64>, name: &str| -> Result<(), VolatilityError> {
        if m.dim() != (n, n) {
            return Err(VolatilityError::DimensionMismatch {
                detail: format!("{name} is {:?}, expected ({n}, {n})", m.dim()),
            });
        }
        Ok(())
    };
    square(h_prev, "H_prev")?;
    square(c, "C")?;
    for a in a_list {
        square(a, "A_k")?;
    }
    for b in b_list {
        square(b, "B_k")?;
    }
    for i in 1..n {
        for j in 0..i {
            if c[[i, j]] != 0.0 {
                return Err(VolatilityError::NotUpperTriangular);
            }
        }
    }

    let mut h = c.t().dot(c);
    let outer = {
        let col = r_prev.view().insert_axis(ndarray::Axis(1));
        col.dot(&col.t())
    };
    for a in a_list {
        h = h + a.t().dot(&outer).dot(a);
    }
    for b in b_list {
        h = h + b.t().dot(h_prev).dot(b);
    }
    Ok(h)
}
