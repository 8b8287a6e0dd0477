//! Finite-horizon dynamic programming for CVaR objectives.
//!
//! Three solvers are provided: precommitted (risk level redistributed along
//! realized transitions), nested (one-step CVaR composed recursively at a
//! fixed level), and fixed (distributional backup with greedy action choice
//! at a fixed level), plus risk-neutral and worst-case baselines. All use
//! backward induction with values pinned to zero at the horizon and argmax
//! ties broken toward the lower action index.

mod solution;
mod solvers;

pub use solution::{CvarSolution, Method};
pub use solvers::{risk_neutral_dp, solve_fcvar, solve_ncvar, solve_pcvar, worst_case_dp};
