//! Backward-induction solvers.

use super::solution::{CvarSolution, Method};
use crate::error::{Error, Result};
use crate::mdp::FiniteHorizonMdp;
use crate::risk::{
    distorted_expectation_interp, distorted_expectation_linear, AlphaGrid, ManySuccessors,
};

/// Argmax over actions with ties broken toward the lower index.
fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Precommitted CVaR: distributional backup across the whole risk grid with
/// the successor risk level rescaled by the minimizing envelope weight. The
/// policy depends on (t, state, risk level); the stored weights drive the
/// risk-level adjustment during rollout.
pub fn solve_pcvar(mdp: &FiniteHorizonMdp, grid: &AlphaGrid) -> Result<CvarSolution> {
    mdp.validate()?;
    let (values, qvalues, policy, xi) = gridded_backup(mdp, grid, None)?;
    Ok(CvarSolution {
        method: Method::Pcvar,
        grid: Some(grid.clone()),
        alpha_bar: None,
        values,
        qvalues,
        policy,
        xi,
        state_ids: mdp.states.iter().map(|s| s.id.clone()).collect(),
    })
}

/// Fixed CVaR: the same distributional backup as the precommitted solver,
/// but each state commits to the single action that maximizes Q at the fixed
/// preference `alpha_bar`, and carries that action's whole value curve.
pub fn solve_fcvar(mdp: &FiniteHorizonMdp, alpha_bar: f64, grid: &AlphaGrid) -> Result<CvarSolution> {
    mdp.validate()?;
    check_alpha_bar(alpha_bar)?;
    let (values, qvalues, policy, xi) = gridded_backup(mdp, grid, Some(alpha_bar))?;
    Ok(CvarSolution {
        method: Method::Fcvar,
        grid: Some(grid.clone()),
        alpha_bar: Some(alpha_bar),
        values,
        qvalues,
        policy,
        xi,
        state_ids: mdp.states.iter().map(|s| s.id.clone()).collect(),
    })
}

type GriddedTables = (
    Vec<Vec<Vec<f64>>>,
    Vec<Vec<Vec<Vec<f64>>>>,
    Vec<Vec<Vec<usize>>>,
    Vec<Vec<Vec<Vec<Vec<f64>>>>>,
);

/// Shared backup for the precommitted and fixed methods. When `alpha_bar` is
/// `Some`, action selection is greedy at that level for every grid point
/// (fixed); otherwise each grid point keeps its own argmax (precommitted).
fn gridded_backup(
    mdp: &FiniteHorizonMdp,
    grid: &AlphaGrid,
    alpha_bar: Option<f64>,
) -> Result<GriddedTables> {
    let horizon = mdp.horizon;
    let n_states = mdp.n_states();
    let n_grid = grid.len();

    let mut values = vec![Vec::new(); horizon + 1];
    values[horizon] = vec![vec![0.0; n_grid]; n_states];
    let mut qvalues = vec![Vec::new(); horizon];
    let mut policy = vec![Vec::new(); horizon];
    let mut xi = vec![Vec::new(); horizon];

    for t in (0..horizon).rev() {
        let mut v_t = vec![Vec::new(); n_states];
        let mut q_t = vec![Vec::new(); n_states];
        let mut pi_t = vec![Vec::new(); n_states];
        let mut xi_t = vec![Vec::new(); n_states];
        for s in 0..n_states {
            let n_actions = mdp.n_actions(s);
            let mut q_s: Vec<Vec<f64>> = Vec::with_capacity(n_actions);
            let mut xi_s: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n_actions);
            for a in 0..n_actions {
                let row = &mdp.actions[s][a];
                let probs: Vec<f64> = row.iter().map(|&(_, p)| p).collect();
                let curves: Vec<&[f64]> = row
                    .iter()
                    .map(|&(succ, _)| values[t + 1][succ].as_slice())
                    .collect();
                let mut q_a = Vec::with_capacity(n_grid);
                let mut xi_a = Vec::with_capacity(n_grid);
                for &alpha in grid.points() {
                    let (dv, w) = distorted_expectation_interp(
                        &probs,
                        &curves,
                        alpha,
                        grid,
                        ManySuccessors::GridSearch,
                    )?;
                    q_a.push(mdp.states[s].reward + dv);
                    xi_a.push(w.xi);
                }
                q_s.push(q_a);
                xi_s.push(xi_a);
            }
            match alpha_bar {
                None => {
                    // Per-grid-point argmax.
                    let mut v_s = Vec::with_capacity(n_grid);
                    let mut pi_s = Vec::with_capacity(n_grid);
                    for k in 0..n_grid {
                        let best = argmax(q_s.iter().map(|q| q[k]));
                        pi_s.push(best);
                        v_s.push(q_s[best][k]);
                    }
                    v_t[s] = v_s;
                    pi_t[s] = pi_s;
                }
                Some(bar) => {
                    let best = argmax(q_s.iter().map(|q| grid.interp(q, bar)));
                    v_t[s] = q_s[best].clone();
                    pi_t[s] = vec![best];
                }
            }
            q_t[s] = q_s;
            xi_t[s] = xi_s;
        }
        values[t] = v_t;
        qvalues[t] = q_t;
        policy[t] = pi_t;
        xi[t] = xi_t;
    }
    Ok((values, qvalues, policy, xi))
}

/// Nested CVaR: scalar values at a single fixed preference, each backup a
/// one-step exact distorted expectation.
pub fn solve_ncvar(mdp: &FiniteHorizonMdp, alpha_bar: f64) -> Result<CvarSolution> {
    mdp.validate()?;
    check_alpha_bar(alpha_bar)?;
    scalar_backup(mdp, Method::Ncvar, Some(alpha_bar), |probs, next| {
        distorted_expectation_linear(probs, next, alpha_bar).map(|(v, w)| (v, Some(w.xi)))
    })
}

/// Standard finite-horizon expectation backup.
pub fn risk_neutral_dp(mdp: &FiniteHorizonMdp) -> Result<CvarSolution> {
    mdp.validate()?;
    scalar_backup(mdp, Method::Neutral, None, |probs, next| {
        let v = probs.iter().zip(next).map(|(&p, &v)| p * v).sum();
        Ok((v, None))
    })
}

/// Backup with the minimum over successors of nonzero probability.
pub fn worst_case_dp(mdp: &FiniteHorizonMdp) -> Result<CvarSolution> {
    mdp.validate()?;
    scalar_backup(mdp, Method::Worstcase, None, |probs, next| {
        let v = probs
            .iter()
            .zip(next)
            .filter(|&(&p, _)| p > 0.0)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        Ok((v, None))
    })
}

fn scalar_backup(
    mdp: &FiniteHorizonMdp,
    method: Method,
    alpha_bar: Option<f64>,
    mut backup: impl FnMut(&[f64], &[f64]) -> Result<(f64, Option<Vec<f64>>)>,
) -> Result<CvarSolution> {
    let horizon = mdp.horizon;
    let n_states = mdp.n_states();

    let mut values = vec![Vec::new(); horizon + 1];
    values[horizon] = vec![vec![0.0]; n_states];
    let mut qvalues = vec![Vec::new(); horizon];
    let mut policy = vec![Vec::new(); horizon];
    let mut xi_table = vec![Vec::new(); horizon];
    let store_xi = alpha_bar.is_some();

    for t in (0..horizon).rev() {
        let mut v_t = vec![Vec::new(); n_states];
        let mut q_t = vec![Vec::new(); n_states];
        let mut pi_t = vec![Vec::new(); n_states];
        let mut xi_t = vec![Vec::new(); n_states];
        for s in 0..n_states {
            let mut q_s: Vec<Vec<f64>> = Vec::new();
            let mut xi_s: Vec<Vec<Vec<f64>>> = Vec::new();
            for row in &mdp.actions[s] {
                let probs: Vec<f64> = row.iter().map(|&(_, p)| p).collect();
                let next: Vec<f64> = row.iter().map(|&(succ, _)| values[t + 1][succ][0]).collect();
                let (dv, w) = backup(&probs, &next)?;
                q_s.push(vec![mdp.states[s].reward + dv]);
                if store_xi {
                    xi_s.push(vec![w.unwrap_or_else(|| vec![1.0; probs.len()])]);
                }
            }
            let best = argmax(q_s.iter().map(|q| q[0]));
            v_t[s] = vec![q_s[best][0]];
            pi_t[s] = vec![best];
            q_t[s] = q_s;
            if store_xi {
                xi_t[s] = xi_s;
            }
        }
        values[t] = v_t;
        qvalues[t] = q_t;
        policy[t] = pi_t;
        if store_xi {
            xi_table[t] = xi_t;
        }
    }

    Ok(CvarSolution {
        method,
        grid: None,
        alpha_bar,
        values,
        qvalues,
        policy,
        xi: if store_xi { xi_table } else { Vec::new() },
        state_ids: mdp.states.iter().map(|s| s.id.clone()).collect(),
    })
}

fn check_alpha_bar(alpha_bar: f64) -> Result<()> {
    if !(alpha_bar > 0.0 && alpha_bar <= 1.0) {
        return Err(Error::InvalidAlpha { alpha: alpha_bar });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{build_two_stage_tree, TreeVariant};

    const LEFT: usize = 0;
    const RIGHT: usize = 1;

    #[test]
    fn horizon_values_are_zero() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let grid = AlphaGrid::default();
        for sol in [
            solve_pcvar(&mdp, &grid).unwrap(),
            solve_fcvar(&mdp, 0.1, &grid).unwrap(),
            solve_ncvar(&mdp, 0.1).unwrap(),
            risk_neutral_dp(&mdp).unwrap(),
            worst_case_dp(&mdp).unwrap(),
        ] {
            for slot in &sol.values[sol.horizon()] {
                assert!(slot.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn risk_neutral_tree_value() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let sol = risk_neutral_dp(&mdp).unwrap();
        // Best plan is right at A, left at B: 0.9*2 + 0.01*(-2) + 0.09*1 = 1.87.
        assert!((sol.values[0][0][0] - 1.87).abs() < 1e-12);
        assert_eq!(sol.policy[0][0][0], RIGHT);
        let b = mdp.state_index("B").unwrap();
        assert_eq!(sol.policy[1][b][0], LEFT);
    }

    #[test]
    fn worst_case_tree_policy() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let sol = worst_case_dp(&mdp).unwrap();
        let b = mdp.state_index("B").unwrap();
        // At B: worst of left is -2, of right is 0 -> right.
        assert_eq!(sol.policy[1][b][0], RIGHT);
        // At A: right worst case is min(0, 2) = 0 vs left -4 -> right.
        assert_eq!(sol.policy[0][0][0], RIGHT);
        assert!((sol.values[0][0][0] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn pcvar_tree_commits_to_the_risky_plan() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let grid = AlphaGrid::default();
        let sol = solve_pcvar(&mdp, &grid).unwrap();
        let b = mdp.state_index("B").unwrap();

        let v0 = sol.value_at(0, 0, 0.1);
        assert!((v0 - 0.7).abs() < 0.02, "V0(A, 0.1) = {v0}");
        assert_eq!(sol.action_at(0, 0, 0.1), RIGHT);
        // On the way to B the envelope weight is 10, so B is evaluated at
        // alpha = 1 where the plan picks left.
        let xi = sol.xi_at(0, 0, RIGHT, 0.1).unwrap();
        let j_b = mdp.actions[0][RIGHT].iter().position(|&(s, _)| s == b).unwrap();
        assert!((xi[j_b] - 10.0).abs() < 0.2, "xi(B) = {}", xi[j_b]);
        assert_eq!(sol.action_at(1, b, 1.0), LEFT);
    }

    #[test]
    fn fcvar_tree_defects_at_b() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let grid = AlphaGrid::default();
        let sol = solve_fcvar(&mdp, 0.1, &grid).unwrap();
        let b = mdp.state_index("B").unwrap();
        assert_eq!(sol.policy[0][0][0], RIGHT);
        assert_eq!(sol.policy[1][b][0], RIGHT);
    }

    #[test]
    fn ncvar_variant_b_quits_for_certain_loss() {
        let mdp = build_two_stage_tree(TreeVariant::B);
        let sol = solve_ncvar(&mdp, 0.1).unwrap();
        assert_eq!(sol.policy[0][0][0], LEFT);
        assert!((sol.values[0][0][0] - (-4.0)).abs() < 1e-12);
    }

    #[test]
    fn all_methods_agree_at_alpha_one() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let grid = AlphaGrid::default();
        let neutral = risk_neutral_dp(&mdp).unwrap();
        let p = solve_pcvar(&mdp, &grid).unwrap();
        let f = solve_fcvar(&mdp, 1.0, &grid).unwrap();
        let n = solve_ncvar(&mdp, 1.0).unwrap();
        for t in 0..mdp.horizon {
            for s in 0..mdp.n_states() {
                let expect = neutral.values[t][s][0];
                assert!((p.value_at(t, s, 1.0) - expect).abs() < 1e-10);
                assert!((f.value_at(t, s, 1.0) - expect).abs() < 1e-10);
                assert!((n.values[t][s][0] - expect).abs() < 1e-10);
            }
        }
    }
}
