//! Forced-choice switching protocol.
//!
//! Two options at a single second-stage state. The agent is forced to pick
//! option A for six trials with outcomes [1, 1, 0, 1, 1, 1]; from trial
//! seven onward A always pays 0 and B always pays 1, and the agent picks
//! greedily by CVaR. The trial on which the CVaR of A first drops below
//! that of B is the switch trial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::{cvar_gaussian, GaussianBelief};
use crate::twostep::{update_observed, update_unobserved, TwoStepParams};

pub const FORCED_OUTCOMES: [u8; 6] = [1, 1, 0, 1, 1, 1];
pub const DEFAULT_TRIALS: usize = 20;

/// Protocol knobs; the trace uses the protocol's constants unless overridden.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
pub struct Figure4Overrides {
    pub lambda: Option<f64>,
    pub eta2: Option<f64>,
    pub n_trials: Option<usize>,
    pub initial_mean: Option<f64>,
    pub initial_variance: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Figure4Row {
    /// 1-based trial number.
    pub trial: usize,
    pub cvar_a: f64,
    pub cvar_b: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// 0 = A, 1 = B.
    pub choice: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Figure4Trace {
    pub alpha: f64,
    pub rows: Vec<Figure4Row>,
    /// First (1-based) trial on which CVaR(A) < CVaR(B), if any.
    pub switch_trial: Option<usize>,
}

/// Runs the fixed protocol at risk level `alpha`.
pub fn figure4_trace(alpha: f64, overrides: &Figure4Overrides) -> Result<Figure4Trace> {
    if !(0.1..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha { alpha });
    }
    let params = TwoStepParams {
        alpha,
        lambda: overrides.lambda.unwrap_or(0.1),
        eta2: overrides.eta2.unwrap_or(0.003),
        tau_sticky: 0.0,
        tau_2nd: 30.0,
        tau_mb: 0.0,
        tau_mf: 0.0,
    };
    params.validate()?;
    let n_trials = overrides.n_trials.unwrap_or(DEFAULT_TRIALS);

    let init = GaussianBelief {
        mean: overrides.initial_mean.unwrap_or(0.5),
        variance: overrides.initial_variance.unwrap_or(0.03),
    };
    let mut option_a = init;
    let mut option_b = init;

    let mut rows = Vec::with_capacity(n_trials);
    let mut switch_trial = None;
    for trial in 1..=n_trials {
        let cvar_a = cvar_gaussian(&option_a, alpha)?;
        let cvar_b = cvar_gaussian(&option_b, alpha)?;
        if switch_trial.is_none() && cvar_a < cvar_b {
            switch_trial = Some(trial);
        }

        let choice: u8 = if trial <= FORCED_OUTCOMES.len() {
            0
        } else if cvar_b > cvar_a {
            1
        } else {
            0
        };
        let outcome: f64 = if trial <= FORCED_OUTCOMES.len() {
            FORCED_OUTCOMES[trial - 1] as f64
        } else if choice == 0 {
            0.0
        } else {
            1.0
        };

        rows.push(Figure4Row {
            trial,
            cvar_a,
            cvar_b,
            mean_a: option_a.mean,
            mean_b: option_b.mean,
            choice,
        });

        if choice == 0 {
            option_a = update_observed(&option_a, outcome, &params);
            option_b = update_unobserved(&option_b, &params);
        } else {
            option_b = update_observed(&option_b, outcome, &params);
            option_a = update_unobserved(&option_a, &params);
        }
    }

    Ok(Figure4Trace {
        alpha,
        rows,
        switch_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn switch_trials_shift_with_risk_sensitivity() {
        let cases = [(1.0, 10), (0.6, 11), (0.3, 12), (0.1, 13)];
        for (alpha, expected) in cases {
            let trace = figure4_trace(alpha, &Figure4Overrides::default()).unwrap();
            assert_eq!(
                trace.switch_trial,
                Some(expected),
                "alpha={alpha}: {:?}",
                trace.switch_trial
            );
        }
    }

    #[test]
    fn a_stays_below_b_after_the_switch() {
        for alpha in [1.0, 0.6, 0.3, 0.1] {
            let trace = figure4_trace(alpha, &Figure4Overrides::default()).unwrap();
            let switch = trace.switch_trial.unwrap();
            for row in trace.rows.iter().filter(|r| r.trial >= switch) {
                assert!(
                    row.cvar_a < row.cvar_b,
                    "alpha={alpha} trial={}: {} vs {}",
                    row.trial,
                    row.cvar_a,
                    row.cvar_b
                );
            }
        }
    }

    #[test]
    fn trace_has_requested_length_and_forced_prefix() {
        let trace = figure4_trace(0.3, &Figure4Overrides::default()).unwrap();
        assert_eq!(trace.rows.len(), DEFAULT_TRIALS);
        for row in &trace.rows[..6] {
            assert_eq!(row.choice, 0);
        }
    }

    #[test]
    fn alpha_outside_model_range_rejected() {
        assert!(figure4_trace(0.05, &Figure4Overrides::default()).is_err());
        assert!(figure4_trace(1.2, &Figure4Overrides::default()).is_err());
    }
}
