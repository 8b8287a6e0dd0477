//! Risk-sensitive sequential decision making built around conditional
//! value-at-risk (CVaR).
//!
//! The crate provides:
//! - [`risk`]: VaR/CVaR for discrete, Gaussian, and Gaussian-mixture
//!   distributions, and the risk-envelope distorted expectations.
//! - [`twostep`]: a distributional (Kalman-filter-like) learning model of the
//!   two-step task with CVaR-based choice rules.
//! - [`inference`]: likelihood evaluation, bounded maximum-likelihood fitting,
//!   agent simulation, parameter recovery, and model-comparison utilities.
//! - [`mdp`]: finite-horizon MDPs with builders for two-stage decision trees
//!   and a left/right gridworld.
//! - [`dp`]: precommitted, nested, and fixed CVaR dynamic-programming solvers
//!   plus risk-neutral and worst-case baselines.
//! - [`rollout`]: seeded Monte Carlo simulation of solved policies, including
//!   the precommitted risk-level adjustment along realized transitions.

pub mod dp;
pub mod error;
pub mod inference;
pub mod mdp;
mod normal;
pub mod risk;
pub mod rollout;
pub mod twostep;

pub use error::{Error, Result};
