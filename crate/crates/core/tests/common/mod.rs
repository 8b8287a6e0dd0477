//! Helpers shared by the integration suites.
#![allow(dead_code)]

use cvar_core::dp::CvarSolution;
use cvar_core::mdp::{FiniteHorizonMdp, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random small MDP: at most 8 states, two actions, at most 2 stochastic
/// successors per action with branch probabilities in [0.42, 0.58], horizon
/// at most 6. Every trajectory then has probability above the default grid
/// floor, so CVaR at the floor coincides with the worst case.
pub fn random_mdp(seed: u64) -> FiniteHorizonMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_states = rng.random_range(2..=8usize);
    let horizon = rng.random_range(2..=6usize);
    let states: Vec<State> = (0..n_states)
        .map(|i| State {
            id: format!("s{i}"),
            reward: rng.random_range(-2.0..2.0),
            terminal: false,
        })
        .collect();
    let mut actions = Vec::with_capacity(n_states);
    for _ in 0..n_states {
        let mut rows = Vec::new();
        for _ in 0..2 {
            let row = if rng.random::<f64>() < 0.5 {
                vec![(rng.random_range(0..n_states), 1.0)]
            } else {
                let a = rng.random_range(0..n_states);
                let mut b = rng.random_range(0..n_states);
                while b == a {
                    b = rng.random_range(0..n_states);
                }
                let p = rng.random_range(0.42..0.58);
                vec![(a, p), (b, 1.0 - p)]
            };
            rows.push(row);
        }
        actions.push(rows);
    }
    let mdp = FiniteHorizonMdp {
        states,
        actions,
        horizon,
    };
    mdp.validate().unwrap();
    mdp
}

/// Walks every (time, state, risk level) triple the precommitted agent can
/// reach from the start at `alpha0` and records the action taken there.
/// Panics if two different risk levels at the same (time, state) disagree —
/// on trees each node is reached along a single history, so the recorded
/// table is the committed plan.
pub fn extract_plan(
    mdp: &FiniteHorizonMdp,
    sol: &CvarSolution,
    alpha0: f64,
) -> Vec<Vec<Option<usize>>> {
    let mut plan: Vec<Vec<Option<usize>>> = vec![vec![None; mdp.n_states()]; mdp.horizon];
    let grid = sol.grid.as_ref().expect("gridded solution");
    let mut stack = vec![(0usize, mdp.start(), grid.clamp(alpha0))];
    while let Some((t, s, alpha)) = stack.pop() {
        if t >= mdp.horizon || mdp.states[s].terminal {
            continue;
        }
        let action = sol.action_at(t, s, alpha);
        match plan[t][s] {
            Some(existing) => assert_eq!(
                existing, action,
                "plan conflict at t={t} state={} (alpha {alpha})",
                mdp.states[s].id
            ),
            None => plan[t][s] = Some(action),
        }
        let xi = sol.xi_at(t, s, action, alpha).unwrap();
        for (j, &(succ, p)) in mdp.actions[s][action].iter().enumerate() {
            if p > 0.0 {
                stack.push((t + 1, succ, grid.clamp(alpha * xi[j])));
            }
        }
    }
    plan
}
