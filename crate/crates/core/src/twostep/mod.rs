//! Distributional model of the two-step task.
//!
//! Each option's reward probability is tracked by a Gaussian belief updated
//! with a delta rule (observed) or decayed toward the prior (unobserved).
//! Choices follow softmax rules over CVaR values: second-stage options are
//! valued directly, first-stage options by a mixture of model-based (70/30
//! transition mixture) and model-free (directly learned) CVaR, plus a
//! stickiness bonus.

mod beliefs;
mod model;
mod params;

pub use beliefs::{
    mf_first_stage_update, update_observed, update_unobserved, BeliefState, TrialRecord,
};
pub use model::{
    first_stage_choice_prob, mb_first_stage_values, mf_first_stage_values,
    second_stage_choice_prob, softmax2, COMMON_TRANSITION_PROB,
};
pub use params::{
    DerivedConstants, TwoStepParams, ASYMPTOTIC_VARIANCE, INITIAL_MEAN, INITIAL_VARIANCE,
    PARAM_BOUNDS, PARAM_NAMES,
};
