//! Belief dynamics: per-option mean/variance tracking.

use serde::{Deserialize, Serialize};

use super::params::{TwoStepParams, INITIAL_MEAN, INITIAL_VARIANCE};
use crate::error::{Error, Result};
use crate::risk::GaussianBelief;

/// One trial of the task. Categorical fields are 0-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub choice1: u8,
    pub state2: u8,
    pub choice2: u8,
    pub reward: u8,
}

impl TrialRecord {
    pub fn validate(&self, row: usize) -> Result<()> {
        for (field, value) in [
            ("choice1", self.choice1),
            ("state2", self.state2),
            ("choice2", self.choice2),
            ("reward", self.reward),
        ] {
            if value > 1 {
                return Err(Error::DataError {
                    row,
                    field: match field {
                        "choice1" => "choice1",
                        "state2" => "state2",
                        "choice2" => "choice2",
                        _ => "reward",
                    },
                    message: format!("out of range (got {value})"),
                });
            }
        }
        Ok(())
    }
}

/// The learner's beliefs: four second-stage options (2 states x 2 options)
/// and two model-free first-stage options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub second_stage: [[GaussianBelief; 2]; 2],
    pub mf_first: [GaussianBelief; 2],
}

impl BeliefState {
    pub fn initial() -> Self {
        let b = GaussianBelief {
            mean: INITIAL_MEAN,
            variance: INITIAL_VARIANCE,
        };
        Self {
            second_stage: [[b; 2]; 2],
            mf_first: [b; 2],
        }
    }

    /// Applies one trial's worth of updates: the chosen second-stage option
    /// and the chosen first-stage option learn from the reward, everything
    /// else drifts toward the prior.
    pub fn advance(&mut self, trial: &TrialRecord, params: &TwoStepParams) {
        let reward = trial.reward as f64;
        for state in 0..2 {
            for option in 0..2 {
                let belief = &mut self.second_stage[state][option];
                *belief = if state == trial.state2 as usize && option == trial.choice2 as usize {
                    update_observed(belief, reward, params)
                } else {
                    update_unobserved(belief, params)
                };
            }
        }
        *self = Self {
            second_stage: self.second_stage,
            mf_first: mf_first_stage_update(&self.mf_first, trial.choice1, trial.reward, params),
        };
    }
}

/// Observed outcome: delta-rule mean update and variance shrink.
///
/// `mu' = mu + lambda (r - mu)`;
/// `psi^2' = (1 - phi^2) psi^2 + eta^2 - lambda psi^2`.
pub fn update_observed(belief: &GaussianBelief, reward: f64, params: &TwoStepParams) -> GaussianBelief {
    let d = params.derived();
    GaussianBelief {
        mean: belief.mean + params.lambda * (reward - belief.mean),
        variance: (d.one_minus_phi2 - params.lambda) * belief.variance + params.eta2,
    }
}

/// Unobserved option: the variance grows without the shrink term and the
/// mean relaxes toward the 0.5 prior by the same delta rule that drives
/// learning, so the dispersion parameter only ever touches variances.
pub fn update_unobserved(belief: &GaussianBelief, params: &TwoStepParams) -> GaussianBelief {
    let d = params.derived();
    GaussianBelief {
        mean: belief.mean + params.lambda * (INITIAL_MEAN - belief.mean),
        variance: d.one_minus_phi2 * belief.variance + params.eta2,
    }
}

/// First-stage model-free update: the chosen option learns from the trial's
/// reward, the other drifts.
pub fn mf_first_stage_update(
    beliefs: &[GaussianBelief; 2],
    choice1: u8,
    reward: u8,
    params: &TwoStepParams,
) -> [GaussianBelief; 2] {
    let mut out = *beliefs;
    let chosen = choice1 as usize;
    out[chosen] = update_observed(&beliefs[chosen], reward as f64, params);
    out[1 - chosen] = update_unobserved(&beliefs[1 - chosen], params);
    out
}
