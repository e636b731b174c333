//! Mixed absolute/relative floating-point comparisons used throughout.

/// Default absolute tolerance for scalar comparisons.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Default relative tolerance for scalar comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Mixed tolerance: `max(abs_tol, rel_tol * scale)` where scale is the larger
/// magnitude of the two operands.
pub fn mixed_tol(a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    abs_tol.max(rel_tol * a.abs().max(b.abs()))
}

/// True when `a` and `b` agree within the mixed tolerance.
pub fn approx_eq(a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> bool {
    (a - b).abs() <= mixed_tol(a, b, abs_tol, rel_tol)
}

/// Comparison at the crate-default tolerances.
pub fn approx_eq_default(a: f64, b: f64) -> bool {
    approx_eq(a, b, DEFAULT_ABS_TOL, DEFAULT_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_floor_applies_near_zero() {
        assert!(approx_eq_default(0.0, 5e-11));
        assert!(!approx_eq_default(0.0, 5e-10));
    }

    #[test]
    fn relative_part_scales() {
        assert!(approx_eq_default(1e6, 1e6 + 1e-4));
        assert!(!approx_eq_default(1e6, 1e6 + 1.0));
    }
}
