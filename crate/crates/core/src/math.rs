//! Float helpers routed through `libm` for portable, bit-stable results.

/// Natural logarithm.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Exponential.
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Euclidean norm of a 2-vector.
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Four-quadrant arctangent, in degrees.
#[inline]
pub fn atan2_deg(y: f64, x: f64) -> f64 {
    libm::atan2(y, x) * (180.0 / core::f64::consts::PI)
}

/// Absolute value.
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Square root.
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// log σ(x) = −log(1 + e^{−x}), computed stably for large |x|.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -libm::log1p(libm::exp(-x))
    } else {
        x - libm::log1p(libm::exp(x))
    }
}

/// Angular separation of two directions in degrees, in [0, 180].
#[inline]
pub fn angle_sep_deg(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % 360.0;
    if d < 0.0 {
        d += 360.0;
    }
    // d in [0, 360)
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sigmoid_matches_naive_formula() {
        for &x in &[-40.0, -3.0, -0.5, 0.0, 0.5, 3.0, 40.0] {
            let naive = ln(1.0 / (1.0 + exp(-x)));
            assert!((log_sigmoid(x) - naive).abs() < 1e-12, "x={x}");
        }
        // σ(3) ≈ 0.952574; ln of it ≈ −0.0485874.
        assert!((log_sigmoid(3.0) - (-0.048587351573742)).abs() < 1e-12);
    }

    #[test]
    fn log_sigmoid_is_finite_and_negative_in_deep_tails() {
        assert!(log_sigmoid(-800.0) < -700.0);
        assert!(log_sigmoid(-800.0).is_finite());
        assert!(log_sigmoid(800.0) <= 0.0);
    }

    #[test]
    fn angle_sep_wraps() {
        assert_eq!(angle_sep_deg(0.0, 0.0), 0.0);
        assert_eq!(angle_sep_deg(350.0, 10.0), 20.0);
        assert_eq!(angle_sep_deg(10.0, 350.0), 20.0);
        assert_eq!(angle_sep_deg(240.0, 225.0), 15.0);
        assert_eq!(angle_sep_deg(0.0, 180.0), 180.0);
        assert_eq!(angle_sep_deg(-90.0, 90.0), 180.0);
    }
}
