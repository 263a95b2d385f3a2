//! Numerically stable scalar helpers shared across the crate.

/// Logistic function, stable for large |x|.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^x) without overflow for large x or loss for very negative x.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// ln Σ e^{x_i}, accumulated in ascending order so the result does not depend
/// on the order of the inputs.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NEG_INFINITY;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().unwrap();
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = sorted.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// ln (1/n Σ e^{x_i}).
pub fn log_mean_exp(values: &[f64]) -> f64 {
    log_sum_exp(values) - (values.len() as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sigmoid_midpoint_and_saturation() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(1.0 - sigmoid(50.0) < 1e-15);
        assert!(sigmoid(-50.0) < 1e-20);
        assert!((sigmoid(20.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for &x in &[-5.0, -0.5, 0.0, 0.5, 5.0] {
            assert_relative_eq!(softplus(x), (1.0 + f64::exp(x)).ln(), max_relative = 1e-12);
        }
    }

    #[test]
    fn softplus_no_overflow() {
        assert_eq!(softplus(1e4), 1e4);
        assert!(softplus(-1e4) >= 0.0);
        assert!(softplus(750.0).is_finite());
    }

    #[test]
    fn log_sum_exp_is_order_independent_and_stable() {
        let a = [1100.0, 1098.0, 1097.0];
        let b = [1097.0, 1100.0, 1098.0];
        assert_eq!(log_sum_exp(&a), log_sum_exp(&b));
        // lse(x, x) = x + ln 2
        assert_relative_eq!(
            log_sum_exp(&[3.0, 3.0]),
            3.0 + std::f64::consts::LN_2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn log_mean_exp_of_equal_values_is_identity() {
        assert_relative_eq!(log_mean_exp(&[2.5; 7]), 2.5, max_relative = 1e-14);
    }
}
