//! Log-spaced risk-level grid with interpolation of value curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default lower end of the grid. The upper end is always 1.0.
pub const DEFAULT_GRID_MIN: f64 = 0.01;
/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 21;

/// Ordered set of risk levels in (0, 1], log spaced, ending exactly at 1.0.
///
/// Value curves sampled on the grid are interpolated linearly in ln(alpha);
/// queries outside the grid are clamped to its ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    points: Vec<f64>,
}

impl AlphaGrid {
    /// Builds `n` log-spaced points on `[min, 1]`.
    pub fn log_spaced(min: f64, n: usize) -> Result<Self> {
        if !(min > 0.0 && min < 1.0) || !min.is_finite() {
            return Err(Error::InvalidParameter {
                name: "grid_min",
                value: min,
                message: "must lie in (0, 1)".into(),
            });
        }
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_points",
                value: n as f64,
                message: "need at least 2 points".into(),
            });
        }
        let log_min = min.ln();
        let mut points: Vec<f64> = (0..n)
            .map(|i| (log_min * (1.0 - i as f64 / (n - 1) as f64)).exp())
            .collect();
        points[0] = min;
        points[n - 1] = 1.0;
        Ok(Self { points })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let grid = Self { points };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_points",
                value: self.points.len() as f64,
                message: "need at least 2 points".into(),
            });
        }
        if !self.points.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: f64::NAN,
                message: "points must be strictly increasing".into(),
            });
        }
        let first = self.points[0];
        let last = *self.points.last().unwrap();
        if first <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: first,
                message: "first point must be > 0".into(),
            });
        }
        if last != 1.0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: last,
                message: "last point must equal 1.0".into(),
            });
        }
        Ok(())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    /// Clamps a risk level into the representable range `[min, 1]`.
    #[inline]
    pub fn clamp(&self, alpha: f64) -> f64 {
        alpha.clamp(self.min(), 1.0)
    }

    /// Index of the grid cell containing `alpha` (after clamping), as the
    /// lower bracketing index `i` with `points[i] <= alpha <= points[i+1]`.
    #[inline]
    fn bracket(&self, alpha: f64) -> (usize, f64) {
        let a = self.clamp(alpha);
        let n = self.points.len();
        // partition_point returns the first index with point > a.
        let hi = self.points.partition_point(|&p| p <= a);
        if hi >= n {
            return (n - 2, 1.0);
        }
        if hi == 0 {
            return (0, 0.0);
        }
        let i = hi - 1;
        let (lo, up) = (self.points[i], self.points[i + 1]);
        let w = (a.ln() - lo.ln()) / (up.ln() - lo.ln());
        (i, w)
    }

    /// Interpolates a curve sampled on the grid at risk level `alpha`,
    /// linearly in ln(alpha), clamping out-of-range queries.
    #[inline]
    pub fn interp(&self, curve: &[f64], alpha: f64) -> f64 {
        debug_assert_eq!(curve.len(), self.points.len());
        let (i, w) = self.bracket(alpha);
        curve[i] + w * (curve[i + 1] - curve[i])
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self::log_spaced(DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_21_points_ending_at_one() {
        let g = AlphaGrid::default();
        assert_eq!(g.len(), 21);
        assert_eq!(g.min(), 0.01);
        assert_eq!(*g.points().last().unwrap(), 1.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        // Log spacing: constant ratio between consecutive points.
        let r0 = g.points()[1] / g.points()[0];
        for w in g.points().windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-9);
        }
    }

    #[test]
    fn interp_hits_grid_points_exactly() {
        let g = AlphaGrid::default();
        let curve: Vec<f64> = g.points().iter().map(|a| a * a).collect();
        for (i, &a) in g.points().iter().enumerate() {
            assert!((g.interp(&curve, a) - curve[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn interp_clamps_out_of_range() {
        let g = AlphaGrid::default();
        let curve: Vec<f64> = g.points().to_vec();
        assert!((g.interp(&curve, 1e-6) - 0.01).abs() < 1e-12);
        assert!((g.interp(&curve, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interp_is_linear_in_log_alpha() {
        let g = AlphaGrid::default();
        // A curve linear in ln(alpha) must be reproduced exactly everywhere.
        let curve: Vec<f64> = g.points().iter().map(|a| 2.0 * a.ln() + 3.0).collect();
        for &a in &[0.013, 0.05, 0.18, 0.42, 0.9] {
            assert!((g.interp(&curve, a) - (2.0 * a.ln() + 3.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(AlphaGrid::log_spaced(0.0, 21).is_err());
        assert!(AlphaGrid::log_spaced(0.5, 1).is_err());
        assert!(AlphaGrid::from_points(vec![0.1, 0.9]).is_err());
        assert!(AlphaGrid::from_points(vec![0.1, 0.1, 1.0]).is_err());
    }
}
