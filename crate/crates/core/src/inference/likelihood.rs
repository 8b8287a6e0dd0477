//! Trial-by-trial negative log-likelihood.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::twostep::{
    first_stage_choice_prob, second_stage_choice_prob, BeliefState, TrialRecord, TwoStepParams,
};

/// Probability floor inside the log-likelihood; extreme inverse temperatures
/// can underflow the softmax otherwise.
pub const PROB_FLOOR: f64 = 1e-12;

/// Which model evaluates the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Risk-neutral baseline: the CVaR model pinned at alpha = 1 (5 free
    /// parameters).
    Mean,
    /// Full risk-sensitive model (7 free parameters).
    Cvar,
}

impl ModelKind {
    pub fn n_params(&self) -> usize {
        match self {
            ModelKind::Mean => 5,
            ModelKind::Cvar => 7,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Mean => "mean",
            ModelKind::Cvar => "cvar",
        }
    }

    /// Applies the model's internal constraints to a parameter set.
    pub fn constrain(&self, mut params: TwoStepParams) -> TwoStepParams {
        if *self == ModelKind::Mean {
            params.alpha = 1.0;
        }
        params
    }
}

/// Negative log-likelihood of both stage choices across trials, with
/// beliefs updated trial by trial. `ModelKind::Mean` forces alpha to 1.
pub fn negative_log_likelihood(
    params: &TwoStepParams,
    trials: &[TrialRecord],
    model: ModelKind,
) -> Result<f64> {
    let params = model.constrain(*params);
    let mut beliefs = BeliefState::initial();
    let mut prev_choice1: Option<u8> = None;
    let mut nll = 0.0;
    for (row, trial) in trials.iter().enumerate() {
        trial.validate(row)?;
        let p1 = first_stage_choice_prob(&beliefs, prev_choice1, &params)?;
        nll -= p1[trial.choice1 as usize].max(PROB_FLOOR).ln();
        let p2 =
            second_stage_choice_prob(&beliefs.second_stage[trial.state2 as usize], &params)?;
        nll -= p2[trial.choice2 as usize].max(PROB_FLOOR).ln();
        beliefs.advance(trial, &params);
        prev_choice1 = Some(trial.choice1);
    }
    Ok(nll)
}
