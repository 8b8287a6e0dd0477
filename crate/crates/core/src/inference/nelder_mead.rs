//! Bounded Nelder-Mead simplex minimizer.
//!
//! Standard reflection/expansion/contraction/shrink moves with every
//! candidate clamped into the box. Deterministic given the starting point.

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    #[allow(dead_code)]
    pub evaluations: usize,
    pub converged: bool,
}

pub struct NelderMead {
    pub bounds: Vec<(f64, f64)>,
    pub max_evaluations: usize,
    /// Converged when the simplex's function spread falls below
    /// `f_tol * (1 + |f_best|)` and its diameter below `x_tol`.
    pub f_tol: f64,
    pub x_tol: f64,
}

impl NelderMead {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            bounds,
            max_evaluations: 3000,
            f_tol: 1e-9,
            x_tol: 1e-7,
        }
    }

    fn clamp(&self, x: &mut [f64]) {
        for (xi, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *xi = xi.clamp(lo, hi);
        }
    }

    pub fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, start: &[f64]) -> NelderMeadResult {
        let n = self.bounds.len();
        assert_eq!(start.len(), n);
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
            *evals += 1;
            f(x)
        };

        // Initial simplex: start point plus 5% of each box width per axis.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let mut x0 = start.to_vec();
        self.clamp(&mut x0);
        let f0 = eval(&x0, &mut evals);
        simplex.push((x0.clone(), f0));
        for d in 0..n {
            let (lo, hi) = self.bounds[d];
            let width = hi - lo;
            let mut x = x0.clone();
            let step = 0.05 * width;
            x[d] = if x[d] + step <= hi { x[d] + step } else { x[d] - step };
            self.clamp(&mut x);
            let fx = eval(&x, &mut evals);
            simplex.push((x, fx));
        }

        let mut converged = false;
        while evals < self.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if (worst - best).abs() <= self.f_tol * (1.0 + best.abs()) && diameter <= self.x_tol {
                converged = true;
                break;
            }

            // Centroid of all but the worst.
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }

            let blend = |a: f64, from: &[f64], to: &[f64]| -> Vec<f64> {
                let mut out: Vec<f64> = from
                    .iter()
                    .zip(to)
                    .map(|(&c, &w)| c + a * (c - w))
                    .collect();
                self.clamp(&mut out);
                out
            };

            let reflected = blend(alpha, &centroid, &simplex[n].0);
            let f_reflected = eval(&reflected, &mut evals);

            if f_reflected < simplex[0].1 {
                let expanded = blend(gamma, &centroid, &simplex[n].0);
                let f_expanded = eval(&expanded, &mut evals);
                simplex[n] = if f_expanded < f_reflected {
                    (expanded, f_expanded)
                } else {
                    (reflected, f_reflected)
                };
            } else if f_reflected < simplex[n - 1].1 {
                simplex[n] = (reflected, f_reflected);
            } else {
                let contracted = blend(-rho, &centroid, &simplex[n].0);
                let f_contracted = eval(&contracted, &mut evals);
                if f_contracted < simplex[n].1 {
                    simplex[n] = (contracted, f_contracted);
                } else {
                    // Shrink toward the best vertex.
                    let best_x = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        let mut x: Vec<f64> = entry
                            .0
                            .iter()
                            .zip(&best_x)
                            .map(|(&xi, &bi)| bi + sigma * (xi - bi))
                            .collect();
                        self.clamp(&mut x);
                        let fx = eval(&x, &mut evals);
                        *entry = (x, fx);
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        NelderMeadResult {
            x: simplex[0].0.clone(),
            value: simplex[0].1,
            evaluations: evals,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_bounded_quadratic() {
        let nm = NelderMead::new(vec![(-5.0, 5.0), (-5.0, 5.0)]);
        let mut f = |x: &[f64]| (x[0] - 1.5).powi(2) + 2.0 * (x[1] + 0.5).powi(2);
        let res = nm.minimize(&mut f, &[4.0, 4.0]);
        assert!(res.converged);
        assert!(res.evaluations > 10 && res.evaluations <= nm.max_evaluations);
        assert!((res.x[0] - 1.5).abs() < 1e-4, "{:?}", res.x);
        assert!((res.x[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn respects_bounds_when_optimum_is_outside() {
        let nm = NelderMead::new(vec![(0.0, 1.0)]);
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2);
        let res = nm.minimize(&mut f, &[0.2]);
        assert!((res.x[0] - 1.0).abs() < 1e-6, "{:?}", res.x);
    }

    #[test]
    fn rosenbrock_from_a_corner() {
        let nm = NelderMead {
            bounds: vec![(-2.0, 2.0), (-2.0, 2.0)],
            max_evaluations: 5000,
            f_tol: 1e-12,
            x_tol: 1e-9,
        };
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let res = nm.minimize(&mut f, &[-1.5, -1.5]);
        assert!(res.value < 1e-6, "value {}", res.value);
    }
}
