//! Monte Carlo simulation of solved policies.
//!
//! Episodes are independent; each draws its random stream from
//! `(seed, episode index)` so batch summaries are reproducible regardless of
//! execution order. Precommitted policies adjust their risk level along
//! realized transitions using the stored envelope weights, clamped to the
//! grid range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{CvarSolution, Method};
use crate::error::{Error, Result};
use crate::mdp::FiniteHorizonMdp;
use crate::risk::DiscreteDistribution;

/// One step of an episode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: usize,
    pub state: usize,
    pub alpha: f64,
    pub action: usize,
    pub next_state: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub steps: Vec<TraceStep>,
    pub total_return: f64,
    /// Time at which the episode stopped (terminal entry or horizon).
    pub end_time: usize,
}

/// Per-state action statistics over a batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateActionStats {
    pub state: String,
    pub visits: u64,
    pub action_counts: Vec<u64>,
    pub modal_action: usize,
    /// True when one action accounts for every visit of this state.
    pub unique_action: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RolloutSummary {
    pub method: Method,
    pub alpha0: f64,
    pub episodes: u64,
    pub seed: u64,
    pub mean_return: f64,
    /// Exact value/count histogram of episode returns.
    pub return_histogram: Vec<(f64, u64)>,
    /// Empirical CVaR of the returns at each requested level.
    pub empirical_cvar: Vec<(f64, f64)>,
    pub state_stats: Vec<StateActionStats>,
    /// Largest end time observed across episodes.
    pub max_end_time: usize,
}

impl RolloutSummary {
    pub fn returns_distribution(&self) -> Result<DiscreteDistribution> {
        let n = self.episodes as f64;
        DiscreteDistribution::new(
            self.return_histogram
                .iter()
                .map(|&(v, c)| (v, c as f64 / n))
                .collect(),
        )
    }

    pub fn stats_for(&self, state_id: &str) -> Option<&StateActionStats> {
        self.state_stats.iter().find(|s| s.state == state_id)
    }
}

fn check_alpha0(method: Method, solution: &CvarSolution, alpha0: f64) -> Result<()> {
    if solution.method != method {
        return Err(Error::MethodMismatch {
            solved: solution.method.name().into(),
            requested: method.name().into(),
        });
    }
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return Err(Error::InvalidAlpha { alpha: alpha0 });
    }
    Ok(())
}

/// Simulates one episode from the start state.
pub fn run_episode(
    mdp: &FiniteHorizonMdp,
    solution: &CvarSolution,
    method: Method,
    alpha0: f64,
    seed: u64,
) -> Result<EpisodeTrace> {
    check_alpha0(method, solution, alpha0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    episode_with_rng(mdp, solution, alpha0, &mut rng)
}

fn episode_with_rng(
    mdp: &FiniteHorizonMdp,
    solution: &CvarSolution,
    alpha0: f64,
    rng: &mut impl Rng,
) -> Result<EpisodeTrace> {
    let adjusts_alpha = solution.method == Method::Pcvar;
    let mut state = mdp.start();
    let mut alpha = match &solution.grid {
        Some(grid) => grid.clamp(alpha0),
        None => alpha0,
    };
    let mut steps = Vec::new();
    let mut total = 0.0;
    let mut end_time = mdp.horizon;

    for t in 0..mdp.horizon {
        total += mdp.states[state].reward;
        if mdp.states[state].terminal {
            end_time = t;
            break;
        }
        let action = solution.action_at(t, state, alpha);
        let row = &mdp.actions[state][action];
        let next_state = sample_row(row, rng);
        steps.push(TraceStep {
            t,
            state,
            alpha,
            action,
            next_state,
        });
        if adjusts_alpha {
            let xi = solution.xi_at(t, state, action, alpha)?;
            let j = row
                .iter()
                .position(|&(s, _)| s == next_state)
                .expect("sampled successor in row");
            let grid = solution.grid.as_ref().unwrap();
            alpha = grid.clamp(alpha * xi[j]);
        }
        state = next_state;
    }
    Ok(EpisodeTrace {
        steps,
        total_return: total,
        end_time,
    })
}

fn sample_row(row: &[(usize, f64)], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for &(succ, p) in row {
        cum += p;
        if u < cum {
            return succ;
        }
    }
    row.last().expect("non-empty row").0
}

/// Runs `n_episodes` independent episodes and aggregates visitation and
/// return statistics. Episode `i` uses stream `i` of the seeded generator.
pub fn run_batch(
    mdp: &FiniteHorizonMdp,
    solution: &CvarSolution,
    method: Method,
    alpha0: f64,
    n_episodes: u64,
    seed: u64,
) -> Result<RolloutSummary> {
    run_batch_with_returns(mdp, solution, method, alpha0, n_episodes, seed).map(|(s, _)| s)
}

/// Like [`run_batch`] but also hands back the per-episode returns in
/// episode order.
pub fn run_batch_with_returns(
    mdp: &FiniteHorizonMdp,
    solution: &CvarSolution,
    method: Method,
    alpha0: f64,
    n_episodes: u64,
    seed: u64,
) -> Result<(RolloutSummary, Vec<f64>)> {
    check_alpha0(method, solution, alpha0)?;

    let traces: Vec<EpisodeTrace> = (0..n_episodes)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            episode_with_rng(mdp, solution, alpha0, &mut rng)
        })
        .collect::<Result<_>>()?;

    let max_actions = (0..mdp.n_states()).map(|s| mdp.n_actions(s)).max().unwrap_or(0);
    let mut action_counts = vec![vec![0u64; max_actions]; mdp.n_states()];
    let mut returns: Vec<f64> = Vec::with_capacity(traces.len());
    let mut max_end_time = 0;
    for trace in &traces {
        returns.push(trace.total_return);
        max_end_time = max_end_time.max(trace.end_time);
        for step in &trace.steps {
            action_counts[step.state][step.action] += 1;
        }
    }

    let mut state_stats = Vec::new();
    for (s, counts) in action_counts.iter().enumerate() {
        let visits: u64 = counts.iter().sum();
        if visits == 0 {
            continue;
        }
        let modal_action = counts
            .iter()
            .enumerate()
            .max_by_key(|&(_, &c)| c)
            .map(|(a, _)| a)
            .unwrap_or(0);
        state_stats.push(StateActionStats {
            state: mdp.states[s].id.clone(),
            visits,
            action_counts: counts.clone(),
            modal_action,
            unique_action: counts.iter().filter(|&&c| c > 0).count() == 1,
        });
    }

    let mut histogram: Vec<(f64, u64)> = Vec::new();
    let mut sorted = returns.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    for &r in &sorted {
        match histogram.last_mut() {
            Some(last) if last.0 == r => last.1 += 1,
            _ => histogram.push((r, 1)),
        }
    }

    let mean_return = returns.iter().sum::<f64>() / returns.len().max(1) as f64;
    let mut cvars = Vec::new();
    for &a in &[0.01, 0.05, 0.1, 0.18, 0.25, 0.5, 1.0] {
        cvars.push((a, empirical_cvar(&returns, a)?));
    }

    let summary = RolloutSummary {
        method,
        alpha0,
        episodes: n_episodes,
        seed,
        mean_return,
        return_histogram: histogram,
        empirical_cvar: cvars,
        state_stats,
        max_end_time,
    };
    Ok((summary, returns))
}

/// CVaR of the empirical distribution of raw returns.
pub fn empirical_cvar(returns: &[f64], alpha: f64) -> Result<f64> {
    DiscreteDistribution::from_samples(returns)?.cvar(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{risk_neutral_dp, solve_pcvar};
    use crate::mdp::{build_two_stage_tree, TreeVariant};
    use crate::risk::AlphaGrid;

    #[test]
    fn empirical_cvar_basics() {
        assert_eq!(empirical_cvar(&[2.5, 2.5, 2.5], 0.3).unwrap(), 2.5);
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((empirical_cvar(&xs, 1.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((empirical_cvar(&xs, 0.25).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_mdp_gives_identical_traces() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let sol = risk_neutral_dp(&mdp).unwrap();
        // Left at A is deterministic; force it by hacking the policy.
        let mut forced = sol.clone();
        forced.policy[0][0][0] = 0;
        let t1 = run_episode(&mdp, &forced, Method::Neutral, 1.0, 7).unwrap();
        let t2 = run_episode(&mdp, &forced, Method::Neutral, 1.0, 1234).unwrap();
        assert_eq!(t1.total_return, t2.total_return);
        assert!((t1.total_return - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn pcvar_alpha_stays_at_one() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let grid = AlphaGrid::default();
        let sol = solve_pcvar(&mdp, &grid).unwrap();
        for seed in 0..20 {
            let trace = run_episode(&mdp, &sol, Method::Pcvar, 1.0, seed).unwrap();
            for step in &trace.steps {
                assert!((step.alpha - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn method_mismatch_is_an_error() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let sol = risk_neutral_dp(&mdp).unwrap();
        assert!(matches!(
            run_episode(&mdp, &sol, Method::Pcvar, 0.5, 0),
            Err(Error::MethodMismatch { .. })
        ));
    }

    #[test]
    fn batches_are_seed_reproducible() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let grid = AlphaGrid::default();
        let sol = solve_pcvar(&mdp, &grid).unwrap();
        let a = run_batch(&mdp, &sol, Method::Pcvar, 0.1, 500, 99).unwrap();
        let b = run_batch(&mdp, &sol, Method::Pcvar, 0.1, 500, 99).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
