//! Exact return distributions under a fixed policy, by exhaustive expansion.

use super::FiniteHorizonMdp;
use crate::error::{Error, Result};
use crate::risk::DiscreteDistribution;

const MAX_PATHS: usize = 1_000_000;
/// Values closer than this are merged into one atom.
const VALUE_MERGE_TOL: f64 = 1e-9;

/// Exact distribution of the summed reward from the start state under a
/// deterministic policy `(t, state) -> action`.
///
/// Expansion stops at terminal states (everything after them is zero reward)
/// or at the horizon. Errors out if more than 10^6 paths would be expanded.
pub fn enumerate_return_distribution(
    mdp: &FiniteHorizonMdp,
    policy: &dyn Fn(usize, usize) -> usize,
) -> Result<DiscreteDistribution> {
    let mut outcomes: Vec<(f64, f64)> = Vec::new();
    let mut paths = 0usize;
    expand(mdp, policy, 0, mdp.start(), 0.0, 1.0, &mut outcomes, &mut paths)?;

    outcomes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (value, prob) in outcomes {
        match merged.last_mut() {
            Some(last) if (value - last.0).abs() <= VALUE_MERGE_TOL => last.1 += prob,
            _ => merged.push((value, prob)),
        }
    }
    DiscreteDistribution::new(merged)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    mdp: &FiniteHorizonMdp,
    policy: &dyn Fn(usize, usize) -> usize,
    t: usize,
    state: usize,
    reward_acc: f64,
    prob: f64,
    outcomes: &mut Vec<(f64, f64)>,
    paths: &mut usize,
) -> Result<()> {
    let total = reward_acc + mdp.states[state].reward;
    if mdp.states[state].terminal || t + 1 >= mdp.horizon {
        *paths += 1;
        if *paths > MAX_PATHS {
            return Err(Error::SizeLimit {
                message: format!("more than {MAX_PATHS} trajectories"),
            });
        }
        outcomes.push((total, prob));
        return Ok(());
    }
    let action = policy(t, state);
    let row = mdp.actions[state]
        .get(action)
        .ok_or_else(|| Error::InvalidMdp {
            message: format!(
                "policy picked action {action} in state {} with {} actions",
                mdp.states[state].id,
                mdp.n_actions(state)
            ),
        })?;
    for &(succ, p) in row {
        if p == 0.0 {
            continue;
        }
        expand(mdp, policy, t + 1, succ, total, prob * p, outcomes, paths)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{build_two_stage_tree, TreeVariant, ACTION_LEFT as LEFT, ACTION_RIGHT as RIGHT};

    #[test]
    fn variant_a_right_right() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let dist = enumerate_return_distribution(&mdp, &|_, _| RIGHT).unwrap();
        let atoms = dist.atoms();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].value - 0.0).abs() < 1e-12 && (atoms[0].prob - 0.1).abs() < 1e-12);
        assert!((atoms[1].value - 2.0).abs() < 1e-12 && (atoms[1].prob - 0.9).abs() < 1e-12);
    }

    #[test]
    fn variant_a_right_then_left() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        let b = mdp.state_index("B").unwrap();
        let dist =
            enumerate_return_distribution(&mdp, &|_, s| if s == b { LEFT } else { RIGHT }).unwrap();
        let atoms = dist.atoms();
        assert_eq!(atoms.len(), 3);
        assert!((atoms[0].value + 2.0).abs() < 1e-12 && (atoms[0].prob - 0.01).abs() < 1e-12);
        assert!((atoms[1].value - 1.0).abs() < 1e-12 && (atoms[1].prob - 0.09).abs() < 1e-12);
        assert!((atoms[2].value - 2.0).abs() < 1e-12 && (atoms[2].prob - 0.9).abs() < 1e-12);
    }

    #[test]
    fn deterministic_chain_is_a_single_atom() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        // Always left: certain -4 from A.
        let dist = enumerate_return_distribution(&mdp, &|_, _| LEFT).unwrap();
        assert_eq!(dist.atoms().len(), 1);
        assert!((dist.atoms()[0].value + 4.0).abs() < 1e-12);
    }

    #[test]
    fn variant_b_worst_outcome_mass() {
        let mdp = build_two_stage_tree(TreeVariant::B);
        // D and E expose a single action; go right wherever there is a choice.
        let policy = |_: usize, s: usize| if mdp.n_actions(s) > 1 { RIGHT } else { 0 };
        let dist = enumerate_return_distribution(&mdp, &policy).unwrap();
        let worst = dist.atoms()[0];
        assert!((worst.value + 5.0).abs() < 1e-12);
        // -5 is reached through B: p(B) = 0.1 times 0.001 from there.
        assert!((worst.prob - 0.1 * 0.001).abs() < 1e-15);
    }
}
