//! Finite-horizon MDP representation and environment builders.
//!
//! States carry a reward `r(s)` granted on entering (the start state's reward
//! is collected at t = 0). Terminal states hand over deterministically to an
//! absorbing zero-reward sink, so the return of an episode is the sum of
//! state rewards up to the horizon. By convention state 0 is the start state.

mod enumerate;
mod gridworld;
mod trees;

pub use enumerate::enumerate_return_distribution;
pub use gridworld::{build_gridworld, GridworldSpec};
pub use trees::{build_two_stage_tree, TreeVariant};

/// Action indices shared by the built-in environments.
pub const ACTION_LEFT: usize = 0;
pub const ACTION_RIGHT: usize = 1;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-9;

/// A state: identifier, entry reward, and whether it ends the episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub id: String,
    pub reward: f64,
    pub terminal: bool,
}

/// Sparse transition row: (successor index, probability).
pub type TransitionRow = Vec<(usize, f64)>;

/// Finite-horizon undiscounted MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHorizonMdp {
    pub states: Vec<State>,
    /// `actions[s][a]` lists the successors of action `a` in state `s`.
    pub actions: Vec<Vec<TransitionRow>>,
    pub horizon: usize,
}

impl FiniteHorizonMdp {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self, state: usize) -> usize {
        self.actions[state].len()
    }

    /// Index of the start state (by convention the first one).
    pub fn start(&self) -> usize {
        0
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidMdp {
                message: "no states".into(),
            });
        }
        if self.actions.len() != self.states.len() {
            return Err(Error::InvalidMdp {
                message: "actions table does not cover all states".into(),
            });
        }
        if self.horizon == 0 {
            return Err(Error::InvalidMdp {
                message: "horizon must be positive".into(),
            });
        }
        for (s, state) in self.states.iter().enumerate() {
            if !state.reward.is_finite() {
                return Err(Error::InvalidMdp {
                    message: format!("state {} has non-finite reward", state.id),
                });
            }
            if self.actions[s].is_empty() {
                return Err(Error::InvalidMdp {
                    message: format!("state {} has no actions", state.id),
                });
            }
            for (a, row) in self.actions[s].iter().enumerate() {
                let mut sum = 0.0;
                for &(succ, p) in row {
                    if succ >= self.states.len() {
                        return Err(Error::InvalidMdp {
                            message: format!("state {}, action {a}: successor {succ} out of range", state.id),
                        });
                    }
                    if !(p >= 0.0) || !p.is_finite() {
                        return Err(Error::InvalidMdp {
                            message: format!("state {}, action {a}: bad probability {p}", state.id),
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidMdp {
                        message: format!("state {}, action {a}: row sums to {sum}", state.id),
                    });
                }
            }
            if state.terminal {
                // A terminal state hands over deterministically to a
                // zero-reward state that only reaches zero-reward states.
                for (a, row) in self.actions[s].iter().enumerate() {
                    if row.len() != 1 || (row[0].1 - 1.0).abs() > ROW_SUM_TOL {
                        return Err(Error::InvalidMdp {
                            message: format!(
                                "terminal state {}, action {a}: must transition deterministically",
                                state.id
                            ),
                        });
                    }
                    let sink = row[0].0;
                    if self.states[sink].reward != 0.0 {
                        return Err(Error::InvalidMdp {
                            message: format!(
                                "terminal state {} must land in a zero-reward sink",
                                state.id
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> MdpJson {
        MdpJson::from(self)
    }

    pub fn from_json(json: &MdpJson) -> Result<Self> {
        json.build()
    }
}

/// Serialized MDP schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MdpJson {
    pub schema_version: u32,
    pub states: Vec<State>,
    pub actions: Vec<ActionJson>,
    pub horizon: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionJson {
    pub state: String,
    pub action: usize,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionJson {
    pub to: String,
    pub p: f64,
}

impl From<&FiniteHorizonMdp> for MdpJson {
    fn from(mdp: &FiniteHorizonMdp) -> Self {
        let mut actions = Vec::new();
        for (s, rows) in mdp.actions.iter().enumerate() {
            for (a, row) in rows.iter().enumerate() {
                actions.push(ActionJson {
                    state: mdp.states[s].id.clone(),
                    action: a,
                    transitions: row
                        .iter()
                        .map(|&(succ, p)| TransitionJson {
                            to: mdp.states[succ].id.clone(),
                            p,
                        })
                        .collect(),
                });
            }
        }
        MdpJson {
            schema_version: 1,
            states: mdp.states.clone(),
            actions,
            horizon: mdp.horizon,
        }
    }
}

impl MdpJson {
    fn build(&self) -> Result<FiniteHorizonMdp> {
        let states = self.states.clone();
        let index = |id: &str| -> Result<usize> {
            states
                .iter()
                .position(|s| s.id == id)
                .ok_or_else(|| Error::InvalidMdp {
                    message: format!("unknown state id `{id}`"),
                })
        };
        let mut actions: Vec<Vec<TransitionRow>> = vec![Vec::new(); states.len()];
        for entry in &self.actions {
            let s = index(&entry.state)?;
            if entry.action != actions[s].len() {
                return Err(Error::InvalidMdp {
                    message: format!(
                        "state {}: action indices must be consecutive from 0 (got {})",
                        entry.state, entry.action
                    ),
                });
            }
            let mut row = TransitionRow::new();
            for t in &entry.transitions {
                row.push((index(&t.to)?, t.p));
            }
            actions[s].push(row);
        }
        let mdp = FiniteHorizonMdp {
            states,
            actions,
            horizon: self.horizon,
        };
        mdp.validate()?;
        Ok(mdp)
    }
}
