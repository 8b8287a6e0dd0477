//! Solver output tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::AlphaGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pcvar,
    Ncvar,
    Fcvar,
    Neutral,
    Worstcase,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Pcvar => "pcvar",
            Method::Ncvar => "ncvar",
            Method::Fcvar => "fcvar",
            Method::Neutral => "neutral",
            Method::Worstcase => "worstcase",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcvar" => Ok(Method::Pcvar),
            "ncvar" => Ok(Method::Ncvar),
            "fcvar" => Ok(Method::Fcvar),
            "neutral" => Ok(Method::Neutral),
            "worstcase" => Ok(Method::Worstcase),
            other => Err(Error::InvalidParameter {
                name: "method",
                value: f64::NAN,
                message: format!("unknown method `{other}`"),
            }),
        }
    }
}

/// Value, Q-value, policy, and envelope-weight tables produced by a solver.
///
/// The trailing dimension indexes the risk grid. Methods that represent a
/// single risk level (nested, neutral, worst-case) use a length-1 slot and
/// no grid; the fixed method stores values across the grid but one action
/// per (t, state).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvarSolution {
    pub method: Method,
    /// Risk grid for gridded methods (precommitted, fixed).
    pub grid: Option<AlphaGrid>,
    /// The fixed risk preference for nested/fixed solutions.
    pub alpha_bar: Option<f64>,
    /// `values[t][s][k]`, `t` in `0..=horizon`; `values[horizon]` is all zero.
    pub values: Vec<Vec<Vec<f64>>>,
    /// `qvalues[t][s][a][k]`, `t` in `0..horizon`.
    pub qvalues: Vec<Vec<Vec<Vec<f64>>>>,
    /// `policy[t][s][k]`: argmax action (length-1 slot when the policy does
    /// not depend on the risk level).
    pub policy: Vec<Vec<Vec<usize>>>,
    /// `xi[t][s][a][k][j]`: minimizing envelope weights aligned with the
    /// MDP's transition row `(s, a)`. Empty for baseline methods.
    pub xi: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    /// State ids, in MDP order, for serialized output.
    pub state_ids: Vec<String>,
}

impl CvarSolution {
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    fn grid_required(&self) -> Result<&AlphaGrid> {
        self.grid.as_ref().ok_or_else(|| Error::Internal {
            message: format!("{} solution has no grid", self.method.name()),
        })
    }

    /// State value at time `t` and risk level `alpha` (interpolated for
    /// gridded methods, ignored otherwise).
    pub fn value_at(&self, t: usize, state: usize, alpha: f64) -> f64 {
        let slot = &self.values[t][state];
        if slot.len() == 1 {
            slot[0]
        } else {
            self.grid.as_ref().unwrap().interp(slot, alpha)
        }
    }

    /// Greedy action at time `t`, state, and risk level.
    ///
    /// Precommitted policies interpolate each action's Q-curve at `alpha` and
    /// take the argmax; other methods ignore `alpha`.
    pub fn action_at(&self, t: usize, state: usize, alpha: f64) -> usize {
        let actions = &self.policy[t][state];
        if actions.len() == 1 {
            return actions[0];
        }
        let grid = self.grid.as_ref().unwrap();
        let qs = &self.qvalues[t][state];
        let mut best = 0;
        let mut best_q = grid.interp(&qs[0], alpha);
        for (a, q) in qs.iter().enumerate().skip(1) {
            let qa = grid.interp(q, alpha);
            if qa > best_q {
                best_q = qa;
                best = a;
            }
        }
        best
    }

    /// Envelope weights for `(t, state, action)` at a continuous risk level,
    /// interpolated between the bracketing grid points.
    pub fn xi_at(&self, t: usize, state: usize, action: usize, alpha: f64) -> Result<Vec<f64>> {
        if self.xi.is_empty() {
            return Err(Error::Internal {
                message: format!("{} solution stores no envelope weights", self.method.name()),
            });
        }
        let table = &self.xi[t][state][action];
        if table.len() == 1 {
            return Ok(table[0].clone());
        }
        let grid = self.grid_required()?;
        let n_succ = table[0].len();
        let mut out = Vec::with_capacity(n_succ);
        for j in 0..n_succ {
            let curve: Vec<f64> = table.iter().map(|w| w[j]).collect();
            out.push(grid.interp(&curve, alpha));
        }
        Ok(out)
    }
}
