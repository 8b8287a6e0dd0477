//! Synthetic agents: reward schedules and model-driven trial generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::twostep::{
    first_stage_choice_prob, second_stage_choice_prob, BeliefState, TrialRecord, TwoStepParams,
    COMMON_TRANSITION_PROB,
};

/// Bounds and step size of the drifting reward probabilities.
pub const SCHEDULE_BOUNDS: (f64, f64) = (0.25, 0.75);
pub const SCHEDULE_STEP_SD: f64 = 0.025;

/// Per-trial reward probability for each of the four second-stage options,
/// indexed `[trial][state * 2 + option]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardSchedule {
    pub probs: Vec<[f64; 4]>,
}

impl RewardSchedule {
    /// Reflecting Gaussian random walk on `[0.25, 0.75]`, step sd 0.025,
    /// independently per option.
    pub fn random_walk(n_trials: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let step = Normal::new(0.0, SCHEDULE_STEP_SD).unwrap();
        let (lo, hi) = SCHEDULE_BOUNDS;
        let mut current = [0.0f64; 4];
        for c in current.iter_mut() {
            *c = lo + (hi - lo) * rng.random::<f64>();
        }
        let mut probs = Vec::with_capacity(n_trials);
        for _ in 0..n_trials {
            probs.push(current);
            for c in current.iter_mut() {
                let mut next = *c + step.sample(&mut rng);
                // Reflect at the bounds.
                loop {
                    if next < lo {
                        next = 2.0 * lo - next;
                    } else if next > hi {
                        next = 2.0 * hi - next;
                    } else {
                        break;
                    }
                }
                *c = next;
            }
        }
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Simulates an agent on the task: model-driven choices, 70/30 transitions,
/// binary rewards from the schedule. Deterministic per seed.
pub fn simulate_agent(
    params: &TwoStepParams,
    schedule: &RewardSchedule,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    params.validate()?;
    if schedule.len() < n_trials {
        return Err(Error::InvalidParameter {
            name: "n_trials",
            value: n_trials as f64,
            message: format!("schedule covers only {} trials", schedule.len()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut beliefs = BeliefState::initial();
    let mut prev_choice1: Option<u8> = None;
    let mut trials = Vec::with_capacity(n_trials);

    for t in 0..n_trials {
        let p1 = first_stage_choice_prob(&beliefs, prev_choice1, params)?;
        let choice1: u8 = if rng.random::<f64>() < p1[0] { 0 } else { 1 };

        let common = rng.random::<f64>() < COMMON_TRANSITION_PROB;
        let state2: u8 = if common { choice1 } else { 1 - choice1 };

        let p2 = second_stage_choice_prob(&beliefs.second_stage[state2 as usize], params)?;
        let choice2: u8 = if rng.random::<f64>() < p2[0] { 0 } else { 1 };

        let p_reward = schedule.probs[t][state2 as usize * 2 + choice2 as usize];
        let reward: u8 = if rng.random::<f64>() < p_reward { 1 } else { 0 };

        let trial = TrialRecord {
            choice1,
            state2,
            choice2,
            reward,
        };
        beliefs.advance(&trial, params);
        prev_choice1 = Some(choice1);
        trials.push(trial);
    }
    Ok(trials)
}
