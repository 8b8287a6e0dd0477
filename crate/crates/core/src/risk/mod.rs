//! Risk-measure primitives: VaR/CVaR for discrete distributions, Gaussians,
//! and Gaussian mixtures, plus the risk-envelope distorted expectations used
//! inside the dynamic-programming backups.
//!
//! All operations are pure functions of their inputs.

mod discrete;
mod envelope;
mod gaussian;
mod grid;

pub use discrete::{cvar_discrete, var_discrete, Atom, DiscreteDistribution};
pub use envelope::{
    distorted_expectation_interp, distorted_expectation_linear, ManySuccessors,
    RiskEnvelopeWeights,
};
pub use gaussian::{cvar_gaussian, cvar_gaussian_mixture, GaussianBelief};
pub use grid::{AlphaGrid, DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS};
