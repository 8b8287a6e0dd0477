//! Left/right gridworld with a lavapit along the bottom edge.
//!
//! The agent starts in the upper-left corner. A rightward action moves right
//! with probability 1 - p_err_right and slips downward otherwise; leftward
//! likewise with the (smaller) p_err_left. Leaving the grid on the right,
//! left, or bottom enters the Goal, Quit, or Lavapit exit.

use serde::{Deserialize, Serialize};

use super::{FiniteHorizonMdp, State, TransitionRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridworldSpec {
    pub rows: usize,
    pub cols: usize,
    pub p_err_right: f64,
    pub p_err_left: f64,
    pub reward_goal: f64,
    pub reward_quit: f64,
    pub reward_lavapit: f64,
    /// Time steps; defaults to rows + cols + 2.
    pub horizon: usize,
}

impl Default for GridworldSpec {
    fn default() -> Self {
        let (rows, cols) = (3, 5);
        Self {
            rows,
            cols,
            p_err_right: 0.08,
            p_err_left: 0.04,
            reward_goal: 3.0,
            reward_quit: -2.0,
            reward_lavapit: -15.0,
            horizon: rows + cols + 2,
        }
    }
}

impl GridworldSpec {
    pub fn with_cols(cols: usize) -> Self {
        let rows = 3;
        Self {
            rows,
            cols,
            horizon: rows + cols + 2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 3 || self.cols < 3 {
            return Err(Error::InvalidMdp {
                message: format!("grid too small: {}x{}", self.rows, self.cols),
            });
        }
        for (name, p) in [("p_err_right", self.p_err_right), ("p_err_left", self.p_err_left)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter {
                    name,
                    value: p,
                    message: "must lie in [0, 1]".into(),
                });
            }
        }
        if self.horizon == 0 {
            return Err(Error::InvalidMdp {
                message: "horizon must be positive".into(),
            });
        }
        Ok(())
    }

    /// 1-indexed cell id, row 1 at the top.
    pub fn cell_id(row: usize, col: usize) -> String {
        format!("cell_{row}_{col}")
    }
}

pub fn build_gridworld(spec: &GridworldSpec) -> Result<FiniteHorizonMdp> {
    spec.validate()?;
    let (rows, cols) = (spec.rows, spec.cols);
    let n_cells = rows * cols;

    let mut states: Vec<State> = Vec::with_capacity(n_cells + 4);
    for r in 1..=rows {
        for c in 1..=cols {
            states.push(State {
                id: GridworldSpec::cell_id(r, c),
                reward: 0.0,
                terminal: false,
            });
        }
    }
    states.push(State { id: "goal".into(), reward: spec.reward_goal, terminal: true });
    states.push(State { id: "quit".into(), reward: spec.reward_quit, terminal: true });
    states.push(State { id: "lavapit".into(), reward: spec.reward_lavapit, terminal: true });
    states.push(State { id: "sink".into(), reward: 0.0, terminal: true });
    let goal = n_cells;
    let quit = n_cells + 1;
    let lavapit = n_cells + 2;
    let sink = n_cells + 3;

    let cell = |r: usize, c: usize| (r - 1) * cols + (c - 1);
    // Destination of an intended lateral move / of a downward slip.
    let lateral = |r: usize, c: usize, dir: isize| -> usize {
        if dir < 0 {
            if c == 1 { quit } else { cell(r, c - 1) }
        } else if c == cols {
            goal
        } else {
            cell(r, c + 1)
        }
    };
    let below = |r: usize, c: usize| -> usize {
        if r == rows { lavapit } else { cell(r + 1, c) }
    };

    let mut actions: Vec<Vec<TransitionRow>> = vec![Vec::new(); states.len()];
    for r in 1..=rows {
        for c in 1..=cols {
            let left_row = merge(vec![
                (lateral(r, c, -1), 1.0 - spec.p_err_left),
                (below(r, c), spec.p_err_left),
            ]);
            let right_row = merge(vec![
                (lateral(r, c, 1), 1.0 - spec.p_err_right),
                (below(r, c), spec.p_err_right),
            ]);
            actions[cell(r, c)] = vec![left_row, right_row];
        }
    }
    for s in [goal, quit, lavapit, sink] {
        actions[s] = vec![vec![(sink, 1.0)]];
    }

    let mdp = FiniteHorizonMdp {
        states,
        actions,
        horizon: spec.horizon,
    };
    mdp.validate()?;
    Ok(mdp)
}

/// Collapses duplicate successors (possible in degenerate specs).
fn merge(row: TransitionRow) -> TransitionRow {
    let mut out: TransitionRow = Vec::with_capacity(row.len());
    for (s, p) in row {
        if p == 0.0 {
            continue;
        }
        match out.iter_mut().find(|(t, _)| *t == s) {
            Some(entry) => entry.1 += p,
            None => out.push((s, p)),
        }
    }
    out
}
