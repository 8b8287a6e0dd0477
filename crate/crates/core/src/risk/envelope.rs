//! Risk-envelope distorted expectations.
//!
//! CVaR's dual form minimizes a reweighted expectation over the envelope
//! of weight vectors `xi` with `0 <= xi <= 1/alpha` and distorted mass
//! `sum_i p_i * xi_i = 1`. Two variants are provided: an exact analytic
//! solution when successor values are scalars, and a scan-based solver when
//! each successor's value is itself a curve over alpha (the precommitted
//! backup, where the weight also rescales the successor's risk level).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::grid::AlphaGrid;

/// Per-successor reweighting chosen by the envelope minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEnvelopeWeights {
    pub xi: Vec<f64>,
}

impl RiskEnvelopeWeights {
    /// Checks the envelope constraints against the transition probabilities.
    pub fn validate(&self, probs: &[f64], alpha: f64) -> Result<()> {
        let cap = 1.0 / alpha;
        let mut mass = 0.0;
        for (&xi, &p) in self.xi.iter().zip(probs) {
            if !(-1e-12..=cap + 1e-9).contains(&xi) {
                return Err(Error::Internal {
                    message: format!("xi={xi} outside [0, {cap}]"),
                });
            }
            mass += p * xi;
        }
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::Internal {
                message: format!("distorted mass {mass} != 1"),
            });
        }
        Ok(())
    }
}

fn check_inputs(probs: &[f64], alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    if probs.is_empty() {
        return Err(Error::InvalidDistribution {
            message: "no successors".into(),
        });
    }
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution {
            message: format!("transition probs must be nonnegative and sum to 1 (sum={sum})"),
        });
    }
    Ok(())
}

/// Exact minimizer of `sum_i p_i * xi_i * v_i` over the alpha-envelope.
///
/// Successors are greedily saturated at `xi = 1/alpha` in ascending value
/// order until the distorted mass reaches 1, with a fractional weight on the
/// marginal successor. Equivalent to the discrete CVaR of `(v, p)`.
pub fn distorted_expectation_linear(
    probs: &[f64],
    values: &[f64],
    alpha: f64,
) -> Result<(f64, RiskEnvelopeWeights)> {
    check_inputs(probs, alpha)?;
    if values.len() != probs.len() {
        return Err(Error::InvalidDistribution {
            message: "values/probs length mismatch".into(),
        });
    }

    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));

    let cap = 1.0 / alpha;
    let mut xi = vec![0.0; probs.len()];
    let mut remaining = 1.0f64;
    for &i in &order {
        if probs[i] == 0.0 {
            continue;
        }
        if remaining <= 0.0 {
            break;
        }
        let take = (cap * probs[i]).min(remaining);
        xi[i] = take / probs[i];
        remaining -= take;
    }
    // Rounding may leave a sliver; fold it into the last touched successor.
    if remaining > 1e-15 {
        if let Some(&i) = order
            .iter()
            .rev()
            .find(|&&i| probs[i] > 0.0 && xi[i] < cap)
        {
            xi[i] += remaining / probs[i];
        }
    }

    let value = probs
        .iter()
        .zip(&xi)
        .zip(values)
        .map(|((&p, &x), &v)| p * x * v)
        .sum();
    Ok((value, RiskEnvelopeWeights { xi }))
}

/// How `distorted_expectation_interp` treats transitions with more than two
/// stochastic successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ManySuccessors {
    /// Refuse with `Error::UnsupportedTransition`.
    #[default]
    Reject,
    /// Fall back to a nested grid search over the free weights.
    GridSearch,
}

/// Points in the dense 1-D scan.
const SCAN_POINTS: usize = 1024;
/// Relative tolerance of the local ternary refinement.
const REFINE_TOL: f64 = 1e-6;
/// Per-dimension points for the >2-successor grid-search fallback.
const FALLBACK_POINTS: usize = 64;
const FALLBACK_ROUNDS: usize = 4;
const FALLBACK_MAX_FREE_DIMS: usize = 3;

/// Minimizes `sum_i p_i * xi_i * V_i(alpha * xi_i)` over the alpha-envelope,
/// where each successor's value curve `V_i` is sampled on `grid` and
/// interpolated in ln(alpha); `alpha * xi` arguments are clamped to the grid
/// range before evaluation.
///
/// With one stochastic successor the weight is forced to 1/p; with two, the
/// mass constraint reduces the problem to a bounded 1-D minimization solved
/// by dense scan plus local ternary refinement. More stochastic successors
/// use the grid-search fallback when enabled.
pub fn distorted_expectation_interp(
    probs: &[f64],
    curves: &[&[f64]],
    alpha: f64,
    grid: &AlphaGrid,
    many: ManySuccessors,
) -> Result<(f64, RiskEnvelopeWeights)> {
    check_inputs(probs, alpha)?;
    if curves.len() != probs.len() {
        return Err(Error::InvalidDistribution {
            message: "curves/probs length mismatch".into(),
        });
    }
    for c in curves {
        if c.len() != grid.len() {
            return Err(Error::InvalidDistribution {
                message: "curve not sampled on the grid".into(),
            });
        }
    }

    let active: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let eval = |i: usize, xi: f64| -> f64 {
        probs[i] * xi * grid.interp(curves[i], grid.clamp(alpha * xi))
    };

    match active.len() {
        0 => Err(Error::InvalidDistribution {
            message: "all successor probabilities are zero".into(),
        }),
        1 => {
            let i = active[0];
            // Mass constraint pins xi = 1/p; with p = 1 this is xi = 1 and the
            // successor keeps the current risk level.
            let xi_i = 1.0 / probs[i];
            if xi_i > 1.0 / alpha + 1e-12 {
                return Err(Error::InvalidDistribution {
                    message: format!("single successor with p={} infeasible", probs[i]),
                });
            }
            let mut xi = vec![0.0; probs.len()];
            xi[i] = xi_i;
            Ok((eval(i, xi_i), RiskEnvelopeWeights { xi }))
        }
        2 => {
            let (i, j) = (active[0], active[1]);
            let (pi, pj) = (probs[i], probs[j]);
            let cap = 1.0 / alpha;
            // Feasible interval for xi_i given xi_j = (1 - pi*xi_i)/pj in [0, cap].
            let lo = ((1.0 - pj * cap) / pi).max(0.0);
            let hi = cap.min(1.0 / pi);
            let objective = |x: f64| -> f64 {
                let xj = (1.0 - pi * x) / pj;
                eval(i, x) + eval(j, xj)
            };

            let x_best = scan_and_refine(objective, lo, hi);
            let xj = ((1.0 - pi * x_best) / pj).clamp(0.0, cap);
            let mut xi = vec![0.0; probs.len()];
            xi[i] = x_best;
            xi[j] = xj;
            Ok((objective(x_best), RiskEnvelopeWeights { xi }))
        }
        n => match many {
            ManySuccessors::Reject => Err(Error::UnsupportedTransition { count: n, limit: 2 }),
            ManySuccessors::GridSearch => {
                if n - 1 > FALLBACK_MAX_FREE_DIMS {
                    return Err(Error::UnsupportedTransition {
                        count: n,
                        limit: FALLBACK_MAX_FREE_DIMS + 1,
                    });
                }
                fallback_grid_search(probs, &active, alpha, &eval)
            }
        },
    }
}

/// Dense scan over `[lo, hi]` followed by ternary refinement around the best
/// scanned point.
fn scan_and_refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return lo;
    }
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..SCAN_POINTS {
        let x = if k == SCAN_POINTS - 1 { hi } else { lo + k as f64 * step };
        let v = f(x);
        if v < best_val {
            best_val = v;
            best_idx = k;
        }
    }
    let mut a = lo + best_idx.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best_idx + 1) as f64 * step).min(hi);
    // Never refine below f64 spacing: at one-ulp brackets the midpoints
    // round back onto the endpoints and the loop would spin forever.
    let tol = (REFINE_TOL * (hi - lo)).max(4.0 * f64::EPSILON * (1.0 + hi.abs()));
    let mut rounds = 0;
    while b - a > tol && rounds < 200 {
        rounds += 1;
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if !(a < m1 && m1 < m2 && m2 < b) {
            break;
        }
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let mid = 0.5 * (a + b);
    // Keep whichever candidate actually evaluates lowest.
    let candidates = [mid, lo + best_idx as f64 * step, lo, hi];
    let mut best = candidates[0];
    let mut best_v = f(best);
    for &c in &candidates[1..] {
        let v = f(c);
        if v < best_v {
            best_v = v;
            best = c;
        }
    }
    best
}

/// Nested coordinate grid search for 3..=4 stochastic successors, with
/// iterative zooming around the incumbent.
fn fallback_grid_search(
    probs: &[f64],
    active: &[usize],
    alpha: f64,
    eval: &impl Fn(usize, f64) -> f64,
) -> Result<(f64, RiskEnvelopeWeights)> {
    let cap = 1.0 / alpha;
    let free = &active[..active.len() - 1];
    let last = active[active.len() - 1];

    // Current search box per free dimension.
    let mut boxes: Vec<(f64, f64)> = free.iter().map(|&i| (0.0, cap.min(1.0 / probs[i]))).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for _ in 0..FALLBACK_ROUNDS {
        let mut assign = vec![0.0; free.len()];
        search_dim(
            0,
            probs,
            free,
            last,
            cap,
            eval,
            &boxes,
            &mut assign,
            &mut best,
        );
        let incumbent = match &best {
            Some((_, xs)) => xs.clone(),
            None => break,
        };
        // Zoom each box around the incumbent.
        for (d, b) in boxes.iter_mut().enumerate() {
            let width = (b.1 - b.0) * 4.0 / FALLBACK_POINTS as f64;
            let center = incumbent[d];
            let lo_max = cap.min(1.0 / probs[free[d]]);
            *b = ((center - width).max(0.0), (center + width).min(lo_max));
        }
    }

    let (value, assign) = best.ok_or_else(|| Error::Internal {
        message: "grid-search fallback found no feasible weights".into(),
    })?;
    let mut xi = vec![0.0; probs.len()];
    let mut mass = 0.0;
    for (d, &i) in free.iter().enumerate() {
        xi[i] = assign[d];
        mass += probs[i] * assign[d];
    }
    xi[last] = (1.0 - mass) / probs[last];
    Ok((value, RiskEnvelopeWeights { xi }))
}

#[allow(clippy::too_many_arguments)]
fn search_dim(
    d: usize,
    probs: &[f64],
    free: &[usize],
    last: usize,
    cap: f64,
    eval: &impl Fn(usize, f64) -> f64,
    boxes: &[(f64, f64)],
    assign: &mut Vec<f64>,
    best: &mut Option<(f64, Vec<f64>)>,
) {
    if d == free.len() {
        let mass: f64 = free
            .iter()
            .zip(assign.iter())
            .map(|(&i, &x)| probs[i] * x)
            .sum();
        let xi_last = (1.0 - mass) / probs[last];
        if !(-1e-12..=cap + 1e-12).contains(&xi_last) {
            return;
        }
        let total: f64 = free
            .iter()
            .zip(assign.iter())
            .map(|(&i, &x)| eval(i, x))
            .sum::<f64>()
            + eval(last, xi_last.max(0.0));
        if best.as_ref().is_none_or(|(v, _)| total < *v) {
            *best = Some((total, assign.clone()));
        }
        return;
    }
    let (lo, hi) = boxes[d];
    for k in 0..FALLBACK_POINTS {
        let x = if FALLBACK_POINTS == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (FALLBACK_POINTS - 1) as f64
        };
        assign[d] = x;
        search_dim(d + 1, probs, free, last, cap, eval, boxes, assign, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturates_the_worst_successor() {
        let (v, w) = distorted_expectation_linear(&[0.1, 0.9], &[-15.0, 3.0], 0.1).unwrap();
        assert!((v - (-15.0)).abs() < 1e-12);
        assert!((w.xi[0] - 10.0).abs() < 1e-12);
        assert!(w.xi[1].abs() < 1e-12);
        w.validate(&[0.1, 0.9], 0.1).unwrap();
    }

    #[test]
    fn alpha_one_collapses_to_expectation() {
        let p = [0.2, 0.5, 0.3];
        let v = [1.0, -2.0, 4.0];
        let (val, w) = distorted_expectation_linear(&p, &v, 1.0).unwrap();
        let mean: f64 = p.iter().zip(&v).map(|(&pi, &vi)| pi * vi).sum();
        assert!((val - mean).abs() < 1e-12);
        for &x in &w.xi {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    // Brute-force oracle: scan the feasible envelope for two successors.
    fn brute_force_two(p: &[f64; 2], v: &[f64; 2], alpha: f64, step: f64) -> f64 {
        let cap = 1.0 / alpha;
        let mut best = f64::INFINITY;
        let mut x0 = 0.0;
        while x0 <= cap.min(1.0 / p[0]) + 1e-12 {
            let x1 = (1.0 - p[0] * x0) / p[1];
            if (-1e-9..=cap + 1e-9).contains(&x1) {
                best = best.min(p[0] * x0 * v[0] + p[1] * x1 * v[1]);
            }
            x0 += step;
        }
        best
    }

    #[test]
    fn matches_brute_force_on_even_split() {
        // Worst 80% of {0.5: 0, 0.5: 10}: xi = (1.25, 0.75), value 3.75.
        let p = [0.5, 0.5];
        let v = [0.0, 10.0];
        let oracle = brute_force_two(&p, &v, 0.8, 1e-4);
        let (val, w) = distorted_expectation_linear(&p, &v, 0.8).unwrap();
        assert!((val - oracle).abs() < 1e-3, "{val} vs oracle {oracle}");
        assert!((val - 3.75).abs() < 1e-12);
        assert!((w.xi[0] - 1.25).abs() < 1e-12);
        assert!((w.xi[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_successors_get_zero_weight() {
        let (v, w) = distorted_expectation_linear(&[0.0, 0.1, 0.9], &[-99.0, -15.0, 3.0], 0.1)
            .unwrap();
        assert!((v - (-15.0)).abs() < 1e-12);
        assert_eq!(w.xi[0], 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(distorted_expectation_linear(&[0.5, 0.5], &[0.0, 1.0], 0.0).is_err());
        assert!(distorted_expectation_linear(&[0.5, 0.6], &[0.0, 1.0], 0.5).is_err());
        assert!(distorted_expectation_linear(&[], &[], 0.5).is_err());
        assert!(distorted_expectation_linear(&[1.0], &[0.0, 1.0], 0.5).is_err());
    }

    fn constant_curves(grid: &AlphaGrid, consts: &[f64]) -> Vec<Vec<f64>> {
        consts.iter().map(|&c| vec![c; grid.len()]).collect()
    }

    #[test]
    fn constant_curves_reduce_to_linear() {
        let grid = AlphaGrid::default();
        let consts = [-3.0, 2.0];
        let curves = constant_curves(&grid, &consts);
        let refs: Vec<&[f64]> = curves.iter().map(|c| c.as_slice()).collect();
        let p = [0.3, 0.7];
        for &alpha in &[0.05, 0.18, 0.5, 1.0] {
            let (vi, wi) =
                distorted_expectation_interp(&p, &refs, alpha, &grid, ManySuccessors::Reject)
                    .unwrap();
            let (vl, _) = distorted_expectation_linear(&p, &consts, alpha).unwrap();
            assert!((vi - vl).abs() < 1e-6, "alpha={alpha}: {vi} vs {vl}");
            wi.validate(&p, alpha).unwrap();
        }
    }

    #[test]
    fn alpha_one_is_plain_expectation_of_top_values() {
        let grid = AlphaGrid::default();
        let curves: Vec<Vec<f64>> = vec![
            grid.points().iter().map(|a| a.ln()).collect(),
            grid.points().iter().map(|a| 2.0 * a).collect(),
        ];
        let refs: Vec<&[f64]> = curves.iter().map(|c| c.as_slice()).collect();
        let p = [0.4, 0.6];
        let (v, w) =
            distorted_expectation_interp(&p, &refs, 1.0, &grid, ManySuccessors::Reject).unwrap();
        let expected = 0.4 * curves[0][grid.len() - 1] + 0.6 * curves[1][grid.len() - 1];
        assert!((v - expected).abs() < 1e-9);
        for (&xi, &pi) in w.xi.iter().zip(&p) {
            assert!((xi - 1.0).abs() < 1e-9, "p={pi}");
        }
    }

    #[test]
    fn single_successor_passes_alpha_through() {
        let grid = AlphaGrid::default();
        let curve: Vec<f64> = grid.points().iter().map(|a| a.ln()).collect();
        let refs: Vec<&[f64]> = vec![curve.as_slice()];
        for &alpha in &[0.02, 0.18, 1.0] {
            let (v, w) =
                distorted_expectation_interp(&[1.0], &refs, alpha, &grid, ManySuccessors::Reject)
                    .unwrap();
            assert!((v - alpha.ln()).abs() < 1e-9);
            assert!((w.xi[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_successor_scan_matches_exhaustive_oracle() {
        let grid = AlphaGrid::default();
        // Monotone (in alpha) value curves resembling CVaR curves.
        let curves: Vec<Vec<f64>> = vec![
            grid.points().iter().map(|a| -2.0 / (1.0 + a)).collect(),
            grid.points().iter().map(|a| 1.0 - 0.3 / a.sqrt()).collect(),
        ];
        let refs: Vec<&[f64]> = curves.iter().map(|c| c.as_slice()).collect();
        let p = [0.25, 0.75];
        let alpha = 0.3;
        let (v, w) =
            distorted_expectation_interp(&p, &refs, alpha, &grid, ManySuccessors::Reject).unwrap();
        w.validate(&p, alpha).unwrap();

        // Exhaustive scan with 1e6 points.
        let cap = 1.0 / alpha;
        let hi = cap.min(1.0 / p[0]);
        let mut oracle = f64::INFINITY;
        let n = 1_000_000;
        for k in 0..=n {
            let x0 = hi * k as f64 / n as f64;
            let x1 = (1.0 - p[0] * x0) / p[1];
            if !(-1e-12..=cap).contains(&x1) {
                continue;
            }
            let val = p[0] * x0 * grid.interp(&curves[0], grid.clamp(alpha * x0))
                + p[1] * x1 * grid.interp(&curves[1], grid.clamp(alpha * x1));
            oracle = oracle.min(val);
        }
        assert!((v - oracle).abs() < 1e-5, "{v} vs oracle {oracle}");
    }

    #[test]
    fn three_successors_need_fallback() {
        let grid = AlphaGrid::default();
        let curves = constant_curves(&grid, &[-1.0, 0.0, 2.0]);
        let refs: Vec<&[f64]> = curves.iter().map(|c| c.as_slice()).collect();
        let p = [0.2, 0.3, 0.5];
        let err = distorted_expectation_interp(&p, &refs, 0.5, &grid, ManySuccessors::Reject);
        assert!(matches!(err, Err(Error::UnsupportedTransition { .. })));

        // With constant curves the fallback must agree with the exact answer.
        let (v, w) =
            distorted_expectation_interp(&p, &refs, 0.5, &grid, ManySuccessors::GridSearch)
                .unwrap();
        let (exact, _) = distorted_expectation_linear(&p, &[-1.0, 0.0, 2.0], 0.5).unwrap();
        assert!((v - exact).abs() < 2e-3, "{v} vs exact {exact}");
        w.validate(&p, 0.5).unwrap();
    }
}
