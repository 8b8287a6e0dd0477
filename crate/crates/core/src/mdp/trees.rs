//! Two-stage decision trees.
//!
//! Variant A: from state A, `right` reaches a +2 exit 90% of the time and
//! state B otherwise, while `left` is a certain -4 exit. At B, `right` exits
//! with 0 and `left` exits with -2 (10%) or +1 (90%).
//!
//! Variant B appends a diversion to both B actions: each keeps 90% of its
//! original outcome distribution and moves to state D with 10%. D exits with
//! 0 (90%) or continues to E (10%); E exits with -5 (10%) or 0 (90%), so the
//! -5 outcome has total probability 0.001 from B.

use super::{FiniteHorizonMdp, State, TransitionRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeVariant {
    A,
    B,
}

pub fn build_two_stage_tree(variant: TreeVariant) -> FiniteHorizonMdp {
    let mut states = vec![
        State { id: "A".into(), reward: 0.0, terminal: false },
        State { id: "B".into(), reward: 0.0, terminal: false },
        State { id: "exit+2".into(), reward: 2.0, terminal: true },
        State { id: "exit-4".into(), reward: -4.0, terminal: true },
        State { id: "exit0".into(), reward: 0.0, terminal: true },
        State { id: "exit-2".into(), reward: -2.0, terminal: true },
        State { id: "exit+1".into(), reward: 1.0, terminal: true },
    ];
    let (a, b) = (0, 1);
    let (exit_p2, exit_m4, exit_0, exit_m2, exit_p1) = (2, 3, 4, 5, 6);

    let mut b_right: TransitionRow = vec![(exit_0, 1.0)];
    let mut b_left: TransitionRow = vec![(exit_m2, 0.1), (exit_p1, 0.9)];
    let mut horizon = 4;

    let mut extra_actions: Vec<(usize, Vec<TransitionRow>)> = Vec::new();
    if variant == TreeVariant::B {
        states.push(State { id: "D".into(), reward: 0.0, terminal: false });
        states.push(State { id: "E".into(), reward: 0.0, terminal: false });
        states.push(State { id: "exit-5".into(), reward: -5.0, terminal: true });
        let (d, e, exit_m5) = (7, 8, 9);
        for row in [&mut b_right, &mut b_left] {
            for entry in row.iter_mut() {
                entry.1 *= 0.9;
            }
            row.push((d, 0.1));
        }
        // D and E offer a single dummy action each.
        extra_actions.push((d, vec![vec![(exit_0, 0.9), (e, 0.1)]]));
        extra_actions.push((e, vec![vec![(exit_m5, 0.1), (exit_0, 0.9)]]));
        horizon = 6;
    }

    states.push(State { id: "sink".into(), reward: 0.0, terminal: true });
    let sink = states.len() - 1;

    let mut actions: Vec<Vec<TransitionRow>> = vec![Vec::new(); states.len()];
    actions[a] = vec![
        vec![(exit_m4, 1.0)],              // left
        vec![(b, 0.1), (exit_p2, 0.9)],     // right
    ];
    actions[b] = vec![b_left, b_right];
    for (s, rows) in extra_actions {
        actions[s] = rows;
    }
    for s in 0..states.len() {
        if states[s].terminal {
            actions[s] = vec![vec![(sink, 1.0)]];
        }
    }

    let mdp = FiniteHorizonMdp {
        states,
        actions,
        horizon,
    };
    debug_assert!(mdp.validate().is_ok());
    mdp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_a_is_valid_and_rooted_at_a() {
        let mdp = build_two_stage_tree(TreeVariant::A);
        mdp.validate().unwrap();
        assert_eq!(mdp.states[mdp.start()].id, "A");
        assert_eq!(mdp.n_actions(0), 2);
    }

    #[test]
    fn variant_b_diversion_probability_is_one_in_a_thousand() {
        let mdp = build_two_stage_tree(TreeVariant::B);
        mdp.validate().unwrap();
        let b = mdp.state_index("B").unwrap();
        let d = mdp.state_index("D").unwrap();
        let e = mdp.state_index("E").unwrap();
        let exit_m5 = mdp.state_index("exit-5").unwrap();

        for row in &mdp.actions[b] {
            let p_d = row.iter().find(|&&(s, _)| s == d).map(|&(_, p)| p).unwrap();
            assert!((p_d - 0.1).abs() < 1e-12);
        }
        let p_e = mdp.actions[d][0]
            .iter()
            .find(|&&(s, _)| s == e)
            .map(|&(_, p)| p)
            .unwrap();
        let p_m5 = mdp.actions[e][0]
            .iter()
            .find(|&&(s, _)| s == exit_m5)
            .map(|&(_, p)| p)
            .unwrap();
        assert!((0.1 * p_e * p_m5 - 0.001).abs() < 1e-12);
    }
}
