use super::ols::ols;
use super::EconError;

/// Least-squares factor regression of one asset's returns.
#[derive(Debug, Clone)]
pub struct FactorFit {
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub residual_variance: f64,
    /// two-sided p-values: first the intercept, then one per factor
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Regresses the asset on the factor series with an intercept. When a
/// risk-free series is supplied it is subtracted from the asset and from the
/// first factor (the market), giving the excess-return form; remaining
/// factors are taken to be zero-investment portfolios already.
pub fn factor_fit(
    asset: &[f64],
    factors: &[Vec<f64>],
    riskfree: Option<&[f64]>,
) -> Result<FactorFit, EconError> {
    let t_len = asset.len();
    if factors.is_empty() {
        return Err(EconError::TooShort {
            required: 1,
            actual: 0,
        });
    }
    for f in factors {
        if f.len() != t_len {
            return Err(EconError::LengthMismatch {
                expected: t_len,
                actual: f.len(),
            });
        }
    }
    if let Some(rf) = riskfree {
        if rf.len() != t_len {
            return Err(EconError::LengthMismatch {
                expected: t_len,
                actual: rf.len(),
            });
        }
    }
    let y: Vec<f64> = match riskfree {
        Some(rf) => asset.iter().zip(rf).map(|(&a, &r)| a - r).collect(),
        None => asset.to_vec(),
    };
    let mut columns = Vec::with_capacity(factors.len() + 1);
    columns.push(vec![1.0; t_len]);
    for (k, f) in factors.iter().enumerate() {
        match (k, riskfree) {
            (0, Some(rf)) => columns.push(f.iter().zip(rf).map(|(&v, &r)| v - r).collect()),
            _ => columns.push(f.clone()),
        }
    }
    let fit = ols(&y, &columns)?;
    Ok(FactorFit {
        alpha: fit.coefs[0],
        betas: fit.coefs[1..].to_vec(),
        residual_variance: fit.sigma2,
        p_values: fit.p_values,
        residuals: fit.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn market_itself_has_unit_beta_zero_alpha() {
        let market = noise(300, 4);
        let fit = factor_fit(&market, &[market.clone()], None).unwrap();
        approx::assert_abs_diff_eq!(fit.alpha, 0.0, epsilon = 1e-10);
        approx::assert_abs_diff_eq!(fit.betas[0], 1.0, epsilon = 1e-10);
        assert!(fit.residual_variance < 1e-20);
    }

    #[test]
    fn recovers_single_index_loading() {
        let market = noise(5000, 5);
        let eps = noise(5000, 6);
        let asset: Vec<f64> = market
            .iter()
            .zip(&eps)
            .map(|(&m, &e)| 0.001 + 1.2 * m + 0.5 * e)
            .collect();
        let fit = factor_fit(&asset, &[market], None).unwrap();
        // noise sd 0.5 over 5000 obs puts the standard error near 0.007
        approx::assert_abs_diff_eq!(fit.betas[0], 1.2, epsilon = 0.03);
        assert!(fit.p_values[1] < 1e-10);
    }

    #[test]
    fn independent_asset_gives_uniform_null_p_values() {
        let mut below = 0;
        let trials = 800;
        for s in 0..trials {
            let market = noise(120, 100 + 2 * s);
            let asset = noise(120, 101 + 2 * s);
            let fit = factor_fit(&asset, &[market], None).unwrap();
            if fit.p_values[1] < 0.05 {
                below += 1;
            }
        }
        let rate = below as f64 / trials as f64;
        assert!((0.03..0.075).contains(&rate), "null rate {rate}");
    }

    #[test]
    fn riskfree_shifts_to_excess_returns() {
        let market = noise(400, 7);
        let rf = vec![0.01; 400];
        let asset: Vec<f64> = market.iter().map(|&m| 0.01 + 1.0 * (m - 0.01)).collect();
        let fit = factor_fit(&asset, &[market], Some(&rf)).unwrap();
        approx::assert_abs_diff_eq!(fit.alpha, 0.0, epsilon = 1e-10);
        approx::assert_abs_diff_eq!(fit.betas[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn residuals_orthogonal_to_factors() {
        let f1 = noise(1000, 8);
        let f2 = noise(1000, 9);
        let e = noise(1000, 10);
        let asset: Vec<f64> = (0..1000)
            .map(|t| 0.3 * f1[t] - 0.7 * f2[t] + e[t])
            .collect();
        let fit = factor_fit(&asset, &[f1.clone(), f2.clone()], None).unwrap();
        for f in [&f1, &f2] {
            let dot: f64 = f.iter().zip(&fit.residuals).map(|(&a, &b)| a * b).sum();
            assert!(dot.abs() < 1e-8, "residual dot {dot}");
        }
    }

    #[test]
    fn rejects_collinear_factors() {
        let f1 = noise(200, 11);
        let f2: Vec<f64> = f1.iter().map(|&v| -v).collect();
        let asset = noise(200, 12);
        assert!(factor_fit(&asset, &[f1, f2], None).is_err());
    }
}
