//! Scalar math utilities shared across the toolkit.

use crate::{Error, Result};
use statrs::function::erf;

/// Gaussian tail probability Q(x) = P(Z > x) for standard normal Z.
pub fn q_function(x: f64) -> f64 {
    0.5 * erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal inverse CDF.
///
/// Errors if `p` is outside the open interval (0, 1).
pub fn normal_inverse_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "normal_inverse_cdf: p must be in (0, 1), got {p}"
        )));
    }
    Ok(-std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p))
}

/// Converts a linear power ratio to decibels. Errors if `x <= 0`.
pub fn to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "to_db: value must be positive, got {x}"
        )));
    }
    Ok(10.0 * x.log10())
}

/// Converts decibels to a linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

/// Sample mean of a slice. Returns 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (denominator n) of a slice. Returns 0 for an empty slice.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Central-difference gradient of `f` at `x` with step `h` (must be positive).
///
/// Used as an independent oracle for analytic gradients.
pub fn finite_diff_grad<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    assert!(h > 0.0, "finite_diff_grad: step must be positive");
    let mut xp = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp);
        xp[i] = xi - h;
        let fm = f(&xp);
        xp[i] = xi;
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

/// Upper tail probability of a chi-squared distribution with `df` degrees of
/// freedom, evaluated at `x >= 0`.
pub fn chi_squared_sf(x: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument(
            "chi_squared_sf: df must be positive".into(),
        ));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "chi_squared_sf: x must be nonnegative, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(statrs::function::gamma::gamma_ur(df as f64 / 2.0, x / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_function_reference_values() {
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(1.0) - 0.158_655_253_931_457_07).abs() < 1e-9);
        assert!((q_function(-8.0) - 1.0).abs() < 1e-12);
        assert!(q_function(8.0) < 1e-14);
    }

    #[test]
    fn q_function_symmetry() {
        for i in -80..=80 {
            let x = i as f64 / 10.0;
            assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn q_function_monotone_decreasing() {
        let mut prev = q_function(-8.0);
        for i in -79..=80 {
            let cur = q_function(i as f64 / 10.0);
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn normal_inverse_cdf_round_trip() {
        for &p in &[1e-6, 0.01, 0.15865525393145707, 0.5, 0.84, 0.999] {
            let x = normal_inverse_cdf(p).unwrap();
            assert!((q_function(x) - (1.0 - p)).abs() < 1e-9);
        }
        assert!(normal_inverse_cdf(0.5).unwrap().abs() < 1e-12);
        assert!(normal_inverse_cdf(0.0).is_err());
        assert!(normal_inverse_cdf(1.0).is_err());
    }

    #[test]
    fn db_conversions() {
        assert_eq!(to_db(1.0).unwrap(), 0.0);
        assert!((to_db(100.0).unwrap() - 20.0).abs() < 1e-12);
        assert!((from_db(7.03) - 10.0_f64.powf(0.703)).abs() < 1e-12);
        for &d in &[-10.0, 0.0, 3.0, 9.65] {
            assert!((to_db(from_db(d)).unwrap() - d).abs() < 1e-12);
        }
        assert!(to_db(0.0).is_err());
        assert!(to_db(-2.0).is_err());
        assert!(to_db(f64::NAN).is_err());
    }

    #[test]
    fn mean_and_variance() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert_eq!(variance(&xs), 1.25);
        assert_eq!(mean(&[]), 0.0);
        assert_eq!(variance(&[]), 0.0);
    }

    #[test]
    fn finite_diff_matches_known_gradients() {
        let g = finite_diff_grad(|x| x[0] * x[0] + 3.0 * x[1], &[2.0, -1.0], 1e-5);
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
        let g = finite_diff_grad(|x| x[0].sin(), &[0.7], 1e-6);
        assert!((g[0] - 0.7_f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn chi_squared_sf_reference_values() {
        // df = 2 has the closed form exp(-x/2).
        for &x in &[0.0, 1.0, 5.0, 20.0] {
            assert!((chi_squared_sf(x, 2).unwrap() - (-x / 2.0).exp()).abs() < 1e-10);
        }
        // Median of chi-squared with 1 df is about 0.4549.
        let sf = chi_squared_sf(0.454936, 1).unwrap();
        assert!((sf - 0.5).abs() < 1e-4);
        assert!(chi_squared_sf(-1.0, 2).is_err());
        assert!(chi_squared_sf(1.0, 0).is_err());
    }
}
