//! Small dependency-free Nelder-Mead minimizer for the low-dimensional
//! likelihood surfaces in this module.

pub(crate) struct NmOptions {
    pub step: f64,
    pub max_iter: usize,
    pub ftol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions {
            step: 0.5,
            max_iter: 4000,
            ftol: 1e-10,
        }
    }
}

pub(crate) struct NmResult {
    pub x: Vec<f64>,
    pub fval: f64,
    #[allow(dead_code)] // useful when debugging convergence
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes f starting from a simplex around x0. Non-finite objective
/// values are treated as +inf so the simplex retreats from invalid regions.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    options: &NmOptions,
) -> NmResult {
    let n = x0.len();
    let mut eval = |x: &[f64]| -> f64 {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i] != 0.0 {
            options.step * p[i].abs()
        } else {
            options.step
        };
        simplex.push(p);
    }
    let mut fvals: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if (fvals[worst] - fvals[best]).abs()
            <= options.ftol * (fvals[best].abs() + options.ftol)
        {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for k in 0..n {
                centroid[k] += simplex[i][k] / n as f64;
            }
        }

        let blend = |a: &[f64], b: &[f64], w: f64| -> Vec<f64> {
            a.iter()
                .zip(b)
                .map(|(&x, &y)| x + w * (x - y))
                .collect()
        };
        let reflected = blend(&centroid, &simplex[worst], alpha);
        let f_reflected = eval(&reflected);
        if f_reflected < fvals[best] {
            let expanded = blend(&centroid, &simplex[worst], gamma);
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                fvals[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                fvals[worst] = f_reflected;
            }
        } else if f_reflected < fvals[second_worst] {
            simplex[worst] = reflected;
            fvals[worst] = f_reflected;
        } else {
            let contracted = blend(&centroid, &simplex[worst], -rho);
            let f_contracted = eval(&contracted);
            if f_contracted < fvals[worst] {
                simplex[worst] = contracted;
                fvals[worst] = f_contracted;
            } else {
                // shrink toward the best point
                let anchor = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for k in 0..n {
                        simplex[i][k] = anchor[k] + sigma * (simplex[i][k] - anchor[k]);
                    }
                    fvals[i] = eval(&simplex[i]);
                }
            }
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap())
        .unwrap();
    NmResult {
        x: simplex[best].clone(),
        fval: fvals[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &NmOptions::default(),
        );
        assert!(r.converged);
        approx::assert_abs_diff_eq!(r.x[0], 3.0, epsilon = 1e-4);
        approx::assert_abs_diff_eq!(r.x[1], -1.0, epsilon = 1e-4);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &NmOptions::default(),
        );
        assert!(r.converged);
        approx::assert_abs_diff_eq!(r.x[0], 1.0, epsilon = 1e-3);
        approx::assert_abs_diff_eq!(r.x[1], 1.0, epsilon = 1e-3);
    }

    #[test]
    fn survives_invalid_regions() {
        // objective undefined left of zero
        let r = nelder_mead(
            |x| {
                if x[0] <= 0.0 {
                    f64::NAN
                } else {
                    (x[0].ln() - 1.0).powi(2)
                }
            },
            &[0.5],
            &NmOptions::default(),
        );
        assert!(r.converged);
        approx::assert_abs_diff_eq!(r.x[0], std::f64::consts::E, epsilon = 1e-3);
    }
}
