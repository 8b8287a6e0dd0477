//! Standard normal pdf/cdf/quantile helpers used by the Gaussian risk
//! computations and the belief model.

use statrs::function::erf;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal cumulative distribution function.
#[inline]
pub fn cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z / SQRT_2)
}

/// Standard normal quantile. `p` must be in (0, 1).
#[inline]
pub fn inv_cdf(p: f64) -> f64 {
    -SQRT_2 * erf::erfc_inv(2.0 * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_matches_known_points() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-15);
        // statrs's erfc is good to about 1e-12 here.
        assert!((cdf(1.959963984540054) - 0.975).abs() < 5e-12);
        assert!((cdf(-1.2815515655446004) - 0.1).abs() < 5e-12);
    }

    #[test]
    fn inv_cdf_roundtrips() {
        for &p in &[1e-6, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0 - 1e-9] {
            let z = inv_cdf(p);
            assert!((cdf(z) - p).abs() < 1e-11, "p={p} z={z}");
        }
    }

    #[test]
    fn pdf_is_symmetric_and_normalized_at_zero() {
        assert!((pdf(0.0) - INV_SQRT_2PI).abs() < 1e-16);
        assert!((pdf(1.3) - pdf(-1.3)).abs() < 1e-16);
    }
}
