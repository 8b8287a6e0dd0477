//! Finite outcome distributions and their VaR/CVaR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROB_SUM_TOL: f64 = 1e-9;
/// Slack used when comparing cumulative probabilities against alpha, so that
/// exact-boundary queries (e.g. alpha equal to an atom's cumulative mass) are
/// not derailed by summation rounding.
const CUM_TOL: f64 = 1e-12;

/// One outcome atom: a value and its probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// A finite distribution over real-valued outcomes.
///
/// Atoms are kept sorted by value ascending. Probabilities are nonnegative
/// and sum to 1 within `1e-9`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::try_from(
            atoms
                .into_iter()
                .map(|(value, prob)| Atom { value, prob })
                .collect::<Vec<_>>(),
        )
    }

    /// Empirical distribution putting mass 1/n on each sample.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution {
                message: "no samples".into(),
            });
        }
        let p = 1.0 / samples.len() as f64;
        let mut atoms: Vec<Atom> = samples.iter().map(|&value| Atom { value, prob: p }).collect();
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        // Merge equal values so repeated outcomes collapse to a single atom.
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.value == atom.value => last.prob += atom.prob,
                _ => merged.push(atom),
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.prob).sum()
    }

    pub fn min_value(&self) -> f64 {
        self.atoms[0].value
    }

    pub fn max_value(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].value
    }

    /// Value-at-risk: the smallest atom value whose cumulative probability
    /// reaches `alpha`.
    pub fn var(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let mut cum = 0.0;
        for atom in &self.atoms {
            cum += atom.prob;
            if cum >= alpha - CUM_TOL {
                return Ok(atom.value);
            }
        }
        Ok(self.max_value())
    }

    /// Conditional value-at-risk: the mean of the lower `alpha` tail with
    /// fractional splitting of the atom at the VaR.
    pub fn cvar(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let mut remaining = alpha;
        let mut acc = 0.0;
        for atom in &self.atoms {
            let take = atom.prob.min(remaining);
            acc += take * atom.value;
            remaining -= take;
            if remaining <= CUM_TOL {
                remaining = 0.0;
                break;
            }
        }
        // Any residual mass (probability-sum rounding) sits at the top value.
        if remaining > 0.0 {
            acc += remaining * self.max_value();
        }
        Ok(acc / alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    Ok(())
}

impl TryFrom<Vec<Atom>> for DiscreteDistribution {
    type Error = Error;

    fn try_from(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution {
                message: "at least one atom required".into(),
            });
        }
        let mut sum = 0.0;
        for atom in &atoms {
            if !atom.value.is_finite() {
                return Err(Error::InvalidDistribution {
                    message: format!("non-finite value {}", atom.value),
                });
            }
            if !(atom.prob >= 0.0) || !atom.prob.is_finite() {
                return Err(Error::InvalidDistribution {
                    message: format!("negative or non-finite prob {}", atom.prob),
                });
            }
            sum += atom.prob;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution {
                message: format!("probs sum to {sum}, expected 1"),
            });
        }
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(Self { atoms })
    }
}

impl From<DiscreteDistribution> for Vec<Atom> {
    fn from(d: DiscreteDistribution) -> Self {
        d.atoms
    }
}

/// VaR of a discrete distribution at level `alpha`.
pub fn var_discrete(dist: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    dist.var(alpha)
}

/// CVaR of a discrete distribution at level `alpha`.
pub fn cvar_discrete(dist: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    dist.cvar(alpha)
}
