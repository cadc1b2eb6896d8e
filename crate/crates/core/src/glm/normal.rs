//! Standard normal tail probabilities via the complementary error function.

use std::f64::consts::SQRT_2;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Two-sided tail probability of a standard normal statistic.
pub fn two_sided_tail(z: f64) -> f64 {
    libm::erfc(z.abs() / SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_anchors() {
        assert_relative_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(normal_cdf(1.96), 0.9750021048517795, epsilon = 1e-12);
        assert_relative_eq!(normal_cdf(-1.96), 1.0 - normal_cdf(1.96), epsilon = 1e-15);
    }

    #[test]
    fn two_sided_anchors() {
        assert_relative_eq!(two_sided_tail(0.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(two_sided_tail(1.6449), 0.10, epsilon = 1e-4);
        assert_relative_eq!(two_sided_tail(1.96), 0.05, epsilon = 1e-4);
        assert_relative_eq!(two_sided_tail(-1.96), two_sided_tail(1.96), epsilon = 1e-15);
    }
}
