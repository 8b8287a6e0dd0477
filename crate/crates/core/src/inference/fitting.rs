//! Bounded maximum-likelihood fitting with seeded multi-start.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::likelihood::{negative_log_likelihood, ModelKind};
use super::nelder_mead::NelderMead;
use crate::error::Result;
use crate::twostep::{DerivedConstants, TrialRecord, TwoStepParams, PARAM_BOUNDS};

/// Internal dispersion for the mean model; alpha is pinned to 1 there, so
/// the value never influences choice probabilities.
const MEAN_MODEL_ETA2: f64 = 0.001;
/// Margin keeping lambda strictly below the variance retention factor.
const LAMBDA_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelKind,
    pub params: TwoStepParams,
    pub nll: f64,
    pub bic: f64,
    /// Number of modeled choices (two per trial).
    pub n_obs: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Bayesian information criterion: `2 nll + k ln(n_obs)`.
pub fn bic(nll: f64, k: usize, n_obs: usize) -> f64 {
    2.0 * nll + k as f64 * (n_obs as f64).ln()
}

/// Free-parameter indices (into the canonical 7-vector) for each model.
fn free_indices(model: ModelKind) -> &'static [usize] {
    match model {
        ModelKind::Mean => &[1, 3, 4, 5, 6],
        ModelKind::Cvar => &[0, 1, 2, 3, 4, 5, 6],
    }
}

/// Lifts a free-parameter vector into a full, constraint-respecting set.
fn lift(model: ModelKind, x: &[f64]) -> TwoStepParams {
    let mut full = [1.0, 0.0, MEAN_MODEL_ETA2, 0.0, 0.0, 0.0, 0.0];
    for (&idx, &value) in free_indices(model).iter().zip(x) {
        full[idx] = value;
    }
    let mut params = TwoStepParams::from_array(&full);
    let cap = DerivedConstants::from_eta2(params.eta2).one_minus_phi2 - LAMBDA_MARGIN;
    params.lambda = params.lambda.min(cap);
    params
}

/// Maximum-likelihood fit by bounded Nelder-Mead from `n_restarts` seeded
/// uniform starting points. Deterministic for a fixed seed.
///
/// The risk-sensitive model additionally warm-starts from the mean-model
/// optimum (its exact alpha = 1 slice), so its best NLL can never fall
/// behind the nested baseline.
pub fn fit(
    trials: &[TrialRecord],
    model: ModelKind,
    n_restarts: usize,
    seed: u64,
) -> Result<FitResult> {
    for (row, trial) in trials.iter().enumerate() {
        trial.validate(row)?;
    }

    let warm_start = match model {
        ModelKind::Cvar => {
            let mean_fit = fit(trials, ModelKind::Mean, n_restarts, seed ^ 0x6d65616e)?;
            let p = mean_fit.params;
            Some(vec![
                1.0,
                p.lambda,
                MEAN_MODEL_ETA2,
                p.tau_sticky,
                p.tau_2nd,
                p.tau_mb,
                p.tau_mf,
            ])
        }
        ModelKind::Mean => None,
    };

    let indices = free_indices(model);
    let bounds: Vec<(f64, f64)> = indices.iter().map(|&i| PARAM_BOUNDS[i]).collect();
    let optimizer = NelderMead::new(bounds.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(n_restarts + 1);
    for _ in 0..n_restarts {
        starts.push(draw_start(model, &bounds, &mut rng));
    }
    if let Some(w) = warm_start {
        starts.push(w);
    }

    let mut objective = |x: &[f64]| -> f64 {
        let params = lift(model, x);
        negative_log_likelihood(&params, trials, model).unwrap_or(f64::INFINITY)
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut any_converged = false;
    let restarts_used = starts.len();
    for start in &starts {
        let run = optimizer.minimize(&mut objective, start);
        any_converged |= run.converged;
        if best.as_ref().is_none_or(|(v, _)| run.value < *v) {
            best = Some((run.value, run.x));
        }
    }
    // Polish: restart the simplex at the incumbent, which often escapes a
    // collapsed simplex from the multi-start phase.
    let (mut nll, mut x) = best.expect("at least one restart");
    let polish = optimizer.minimize(&mut objective, &x);
    if polish.value < nll {
        nll = polish.value;
        x = polish.x;
    }
    let params = lift(model, &x);
    let n_obs = 2 * trials.len();

    Ok(FitResult {
        model,
        params,
        nll,
        bic: bic(nll, model.n_params(), n_obs),
        n_obs,
        restarts_used,
        converged: any_converged,
    })
}

/// Uniform draw in the box; for the risk-sensitive model the (lambda, eta2)
/// pair is redrawn until it satisfies the retention constraint.
fn draw_start(model: ModelKind, bounds: &[(f64, f64)], rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect();
        match model {
            ModelKind::Mean => return x,
            ModelKind::Cvar => {
                let cap = DerivedConstants::from_eta2(x[2]).one_minus_phi2;
                if x[1] < cap {
                    return x;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bic_arithmetic() {
        let b = bic(180.0, 5, 400);
        assert!((b - (360.0 + 5.0 * 400.0f64.ln())).abs() < 1e-12);
        assert!((b - 389.95732273553994).abs() < 1e-9);
    }

    #[test]
    fn bic_ordering_matches_nll_for_equal_k() {
        assert!(bic(100.0, 7, 400) < bic(101.0, 7, 400));
        // Nested models on the same data differ by 2*dNLL + 2 ln n.
        let diff = bic(100.0, 7, 400) - bic(102.0, 5, 400);
        assert!((diff - (-4.0 + 2.0 * 400.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(ModelKind::Mean.n_params(), 5);
        assert_eq!(ModelKind::Cvar.n_params(), 7);
    }

    #[test]
    fn lift_enforces_the_lambda_cap() {
        let p = lift(ModelKind::Cvar, &[0.5, 0.95, 0.09, 0.0, 1.0, 1.0, 1.0]);
        assert!(p.lambda < 0.1);
        p.validate().unwrap();
    }
}
