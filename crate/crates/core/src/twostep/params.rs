//! Model parameters and their box bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymptotic variance that a never-observed option's belief converges to.
pub const ASYMPTOTIC_VARIANCE: f64 = 0.1;
/// Initial belief mean for every option.
pub const INITIAL_MEAN: f64 = 0.5;
/// Initial belief variance for every option.
pub const INITIAL_VARIANCE: f64 = 0.03;

/// The seven model parameters with their box bounds.
///
/// `alpha` in [0.1, 1], `lambda` in [0.01, 0.99] (further constrained below
/// `1 - phi^2`), `eta2` in [0.001, 0.09], `tau_sticky` in [0, 20], and the
/// three inverse temperatures in [0, 30].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStepParams {
    pub alpha: f64,
    pub lambda: f64,
    pub eta2: f64,
    pub tau_sticky: f64,
    pub tau_2nd: f64,
    pub tau_mb: f64,
    pub tau_mf: f64,
}

/// (lower, upper) box bounds in canonical parameter order.
pub const PARAM_BOUNDS: [(f64, f64); 7] = [
    (0.1, 1.0),   // alpha
    (0.01, 0.99), // lambda
    (0.001, 0.09), // eta2
    (0.0, 20.0),  // tau_sticky
    (0.0, 30.0),  // tau_2nd
    (0.0, 30.0),  // tau_mb
    (0.0, 30.0),  // tau_mf
];

pub const PARAM_NAMES: [&str; 7] = [
    "alpha",
    "lambda",
    "eta2",
    "tau_sticky",
    "tau_2nd",
    "tau_mb",
    "tau_mf",
];

impl TwoStepParams {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.alpha,
            self.lambda,
            self.eta2,
            self.tau_sticky,
            self.tau_2nd,
            self.tau_mb,
            self.tau_mf,
        ]
    }

    pub fn from_array(x: &[f64; 7]) -> Self {
        Self {
            alpha: x[0],
            lambda: x[1],
            eta2: x[2],
            tau_sticky: x[3],
            tau_2nd: x[4],
            tau_mb: x[5],
            tau_mf: x[6],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let idx = PARAM_NAMES.iter().position(|&n| n == name)?;
        Some(self.to_array()[idx])
    }

    pub fn validate(&self) -> Result<()> {
        let values = self.to_array();
        for ((&value, &(lo, hi)), &name) in
            values.iter().zip(&PARAM_BOUNDS).zip(&PARAM_NAMES)
        {
            if !value.is_finite() || value < lo - 1e-12 || value > hi + 1e-12 {
                return Err(Error::InvalidParameter {
                    name: leak_name(name),
                    value,
                    message: format!("outside [{lo}, {hi}]"),
                });
            }
        }
        let derived = DerivedConstants::from_eta2(self.eta2);
        if self.lambda >= derived.one_minus_phi2 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: self.lambda,
                message: format!("must be below 1 - phi^2 = {}", derived.one_minus_phi2),
            });
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedConstants {
        DerivedConstants::from_eta2(self.eta2)
    }
}

fn leak_name(name: &str) -> &'static str {
    PARAM_NAMES
        .iter()
        .find(|&&n| n == name)
        .copied()
        .unwrap_or("parameter")
}

/// Constants derived from `eta2` by pinning the asymptotic unobserved
/// variance `eta2 / phi^2` to 0.1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// Variance retention factor `1 - phi^2`.
    pub one_minus_phi2: f64,
}

impl DerivedConstants {
    pub fn from_eta2(eta2: f64) -> Self {
        Self {
            one_minus_phi2: 1.0 - eta2 / ASYMPTOTIC_VARIANCE,
        }
    }
}
