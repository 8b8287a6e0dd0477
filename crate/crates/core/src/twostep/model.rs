//! Choice rules: CVaR-based valuation and softmax probabilities.

use super::beliefs::BeliefState;
use super::params::TwoStepParams;
use crate::error::Result;
use crate::risk::{cvar_gaussian, cvar_gaussian_mixture, GaussianBelief};

/// Transition probability from a first-stage action to its common state.
pub const COMMON_TRANSITION_PROB: f64 = 0.7;

/// Numerically-stable two-option softmax over utilities.
pub fn softmax2(utilities: [f64; 2]) -> [f64; 2] {
    let m = utilities[0].max(utilities[1]);
    let e0 = (utilities[0] - m).exp();
    let e1 = (utilities[1] - m).exp();
    let z = e0 + e1;
    [e0 / z, e1 / z]
}

/// Second-stage choice probabilities for the visited state's two options:
/// softmax over `tau_2nd * CVaR_alpha(option)`.
pub fn second_stage_choice_prob(
    beliefs: &[GaussianBelief; 2],
    params: &TwoStepParams,
) -> Result<[f64; 2]> {
    let u0 = params.tau_2nd * cvar_gaussian(&beliefs[0], params.alpha)?;
    let u1 = params.tau_2nd * cvar_gaussian(&beliefs[1], params.alpha)?;
    Ok(softmax2([u0, u1]))
}

/// Model-based first-stage values: a 70/30 mixture of each state's
/// representative option (the option with the larger CVaR in that state),
/// evaluated as a mixture CVaR.
pub fn mb_first_stage_values(
    second_stage: &[[GaussianBelief; 2]; 2],
    params: &TwoStepParams,
) -> Result<[f64; 2]> {
    let mut reps = [second_stage[0][0]; 2];
    for state in 0..2 {
        let c0 = cvar_gaussian(&second_stage[state][0], params.alpha)?;
        let c1 = cvar_gaussian(&second_stage[state][1], params.alpha)?;
        reps[state] = if c1 > c0 {
            second_stage[state][1]
        } else {
            second_stage[state][0]
        };
    }
    let mut out = [0.0; 2];
    for action in 0..2 {
        let p_common = COMMON_TRANSITION_PROB;
        let weights = if action == 0 {
            [p_common, 1.0 - p_common]
        } else {
            [1.0 - p_common, p_common]
        };
        out[action] = cvar_gaussian_mixture(&reps, &weights, params.alpha)?;
    }
    Ok(out)
}

/// Model-free first-stage values: the CVaR of each learned first-stage
/// belief.
pub fn mf_first_stage_values(
    mf_first: &[GaussianBelief; 2],
    params: &TwoStepParams,
) -> Result<[f64; 2]> {
    Ok([
        cvar_gaussian(&mf_first[0], params.alpha)?,
        cvar_gaussian(&mf_first[1], params.alpha)?,
    ])
}

/// First-stage choice probabilities: softmax over the weighted sum of
/// model-based CVaR, model-free CVaR, and a stickiness bonus on the
/// previously chosen action (absent on the first trial).
pub fn first_stage_choice_prob(
    beliefs: &BeliefState,
    prev_choice1: Option<u8>,
    params: &TwoStepParams,
) -> Result<[f64; 2]> {
    let mb = mb_first_stage_values(&beliefs.second_stage, params)?;
    let mf = mf_first_stage_values(&beliefs.mf_first, params)?;
    let mut utilities = [0.0; 2];
    for a in 0..2 {
        let sticky = match prev_choice1 {
            Some(prev) if prev as usize == a => params.tau_sticky,
            _ => 0.0,
        };
        utilities[a] = params.tau_mb * mb[a] + params.tau_mf * mf[a] + sticky;
    }
    Ok(softmax2(utilities))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, tau_2nd: f64) -> TwoStepParams {
        TwoStepParams {
            alpha,
            lambda: 0.2,
            eta2: 0.003,
            tau_sticky: 0.0,
            tau_2nd,
            tau_mb: 1.0,
            tau_mf: 1.0,
        }
    }

    #[test]
    fn identical_beliefs_split_evenly() {
        let b = GaussianBelief { mean: 0.5, variance: 0.03 };
        let p = second_stage_choice_prob(&[b, b], &params(0.3, 10.0)).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_is_uniform() {
        let a = GaussianBelief { mean: 0.9, variance: 0.01 };
        let b = GaussianBelief { mean: 0.1, variance: 0.05 };
        let p = second_stage_choice_prob(&[a, b], &params(0.5, 0.0)).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn logistic_identity_for_known_gap() {
        // tau * gap = 6 -> p(better) = 1/(1+e^-6).
        let a = GaussianBelief { mean: 0.7, variance: 0.01 };
        let b = GaussianBelief { mean: 0.5, variance: 0.01 };
        let p = second_stage_choice_prob(&[a, b], &params(1.0, 30.0)).unwrap();
        let expected = 1.0 / (1.0 + (-6.0f64).exp());
        assert!((p[0] - expected).abs() < 1e-12, "{} vs {expected}", p[0]);
    }

    #[test]
    fn sticky_bonus_logistic_identity() {
        let beliefs = BeliefState::initial();
        let mut p = params(0.5, 10.0);
        p.tau_sticky = 2.0;
        let probs = first_stage_choice_prob(&beliefs, Some(0), &p).unwrap();
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((probs[0] - expected).abs() < 1e-12);
        // No previous choice: symmetric.
        let probs = first_stage_choice_prob(&beliefs, None, &p).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mb_values_symmetric_when_beliefs_identical() {
        let b = GaussianBelief { mean: 0.6, variance: 0.02 };
        let vals = mb_first_stage_values(&[[b, b], [b, b]], &params(0.3, 10.0)).unwrap();
        assert!((vals[0] - vals[1]).abs() < 1e-12);
    }

    #[test]
    fn mb_values_at_alpha_one_use_max_means() {
        let ss = [
            [
                GaussianBelief { mean: 0.8, variance: 0.02 },
                GaussianBelief { mean: 0.3, variance: 0.02 },
            ],
            [
                GaussianBelief { mean: 0.4, variance: 0.02 },
                GaussianBelief { mean: 0.6, variance: 0.02 },
            ],
        ];
        let vals = mb_first_stage_values(&ss, &params(1.0, 10.0)).unwrap();
        let expected0 = 0.7 * 0.8 + 0.3 * 0.6;
        let expected1 = 0.3 * 0.8 + 0.7 * 0.6;
        assert!((vals[0] - expected0).abs() < 1e-12);
        assert!((vals[1] - expected1).abs() < 1e-12);
    }

    #[test]
    fn probabilities_are_proper() {
        let ss = [
            [
                GaussianBelief { mean: 0.9, variance: 0.01 },
                GaussianBelief { mean: 0.2, variance: 0.08 },
            ],
            [
                GaussianBelief { mean: 0.1, variance: 0.05 },
                GaussianBelief { mean: 0.7, variance: 0.02 },
            ],
        ];
        let beliefs = BeliefState {
            second_stage: ss,
            mf_first: [
                GaussianBelief { mean: 0.6, variance: 0.02 },
                GaussianBelief { mean: 0.4, variance: 0.09 },
            ],
        };
        let mut p = params(0.15, 20.0);
        p.tau_mb = 25.0;
        p.tau_mf = 25.0;
        let probs = first_stage_choice_prob(&beliefs, Some(1), &p).unwrap();
        assert!(probs[0] > 0.0 && probs[0] < 1.0);
        assert!((probs[0] + probs[1] - 1.0).abs() < 1e-12);
    }
}
