//! Likelihood evaluation, fitting, simulation, and recovery for the
//! two-step model.
//!
//! Fits and simulations of distinct agents are independent and run in
//! parallel on seeds derived from (seed, agent index), so every report is
//! reproducible bit for bit.

mod figure4;
mod fitting;
mod likelihood;
mod misattribution;
mod nelder_mead;
mod recovery;
mod simulate;
mod stats;

pub use figure4::{
    figure4_trace, Figure4Overrides, Figure4Row, Figure4Trace, DEFAULT_TRIALS, FORCED_OUTCOMES,
};
pub use fitting::{bic, fit, FitResult};
pub use likelihood::{negative_log_likelihood, ModelKind, PROB_FLOOR};
pub use misattribution::{generative_params, misattribution_experiment, MisattributionSummary};
pub use recovery::{recover, sample_generative_params, ParamCorrelations, RecoveryReport};
pub use simulate::{simulate_agent, RewardSchedule, SCHEDULE_BOUNDS, SCHEDULE_STEP_SD};
pub use stats::{median, spearman};
