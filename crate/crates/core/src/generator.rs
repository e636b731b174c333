//! Strictly convex generator functions: a value, a gradient on the relative
//! interior, and an optional Hessian, over a [`ConvexDomain`].
//!
//! Built-ins are the two canonical cases: the quadratic form `x^T W x / 2`
//! (squared-Mahalanobis family, squared Euclidean norm when `W = I`) and the
//! negative entropy `sum_i x_i ln x_i` on the simplex with `0 ln 0 = 0`.

use std::sync::Arc;

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type HessianFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;

/// A strictly convex function with first-order (and optionally second-order)
/// information. Cloning is cheap; the closures are shared.
#[derive(Clone)]
pub struct ConvexGenerator {
    name: String,
    domain: ConvexDomain,
    value_fn: ValueFn,
    gradient_fn: GradientFn,
    hessian_fn: Option<HessianFn>,
}

impl std::fmt::Debug for ConvexGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexGenerator")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("has_hessian", &self.hessian_fn.is_some())
            .finish()
    }
}

impl ConvexGenerator {
    pub fn new(
        name: impl Into<String>,
        domain: ConvexDomain,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        hessian: Option<HessianFn>,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            value_fn: Arc::new(value),
            gradient_fn: Arc::new(gradient),
            hessian_fn: hessian,
        }
    }

    /// The quadratic generator `phi(x) = x^T W x / 2` on all of R^l.
    /// `w` must be symmetric (within 1e-10) and positive-definite.
    pub fn squared_mahalanobis(w: Matrix) -> Result<Self> {
        if w.rows() != w.cols() {
            return Err(Error::LengthMismatch {
                expected: w.rows() * w.rows(),
                got: w.rows() * w.cols(),
            });
        }
        let asym = w.max_asymmetry();
        if asym > 1e-10 {
            return Err(Error::NonSymmetric {
                max_asymmetry: asym,
            });
        }
        if w.cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let dim = w.rows();
        let domain = ConvexDomain::full_space(dim)?;
        let w_value = w.clone();
        let w_grad = w.clone();
        let w_hess = w.clone();
        Ok(Self::new(
            format!("mahalanobis({dim})"),
            domain,
            move |x| 0.5 * linalg::dot(x, &w_value.matvec(x)),
            move |x| w_grad.matvec(x),
            Some(Arc::new(move |_x| w_hess.clone())),
        ))
    }

    /// `phi(x) = ||x||^2 / 2`, the `W = I` case.
    pub fn squared_norm(dim: usize) -> Result<Self> {
        let mut gen = Self::squared_mahalanobis(Matrix::identity(dim))?;
        gen.name = format!("sqnorm({dim})");
        Ok(gen)
    }

    /// Negative entropy `phi(x) = sum_i x_i ln x_i` on the simplex, with the
    /// convention `0 ln 0 = 0`. Natural logarithm; values are in nats.
    pub fn negative_entropy(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { min: 2, got: dim });
        }
        let domain = ConvexDomain::simplex(dim)?;
        Ok(Self::new(
            format!("negentropy({dim})"),
            domain,
            |x| {
                x.iter()
                    .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
                    .sum()
            },
            |x| x.iter().map(|&v| v.ln() + 1.0).collect(),
            Some(Arc::new(|x: &[f64]| {
                Matrix::diagonal(&x.iter().map(|&v| 1.0 / v).collect::<Vec<_>>())
            })),
        ))
    }

    /// Same generator restricted to another domain of equal dimension, e.g.
    /// a quadratic viewed on the simplex.
    pub fn with_domain(mut self, domain: ConvexDomain) -> Result<Self> {
        if domain.dim() != self.domain.dim() {
            return Err(Error::LengthMismatch {
                expected: self.domain.dim(),
                got: domain.dim(),
            });
        }
        self.name = format!("{}@{}", self.name, domain);
        self.domain = domain;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian_fn.is_some()
    }

    /// Evaluate `phi(x)`. The value function is total on the natural
    /// coordinate extension of the domain (e.g. `0 ln 0 = 0` on boundaries),
    /// so no membership check happens here; set-membership is enforced by the
    /// dataset and information layers.
    pub fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "generator value dimension mismatch");
        (self.value_fn)(x)
    }

    /// Evaluate the gradient, defined only where every coordinate is interior.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.domain.coords_interior(x) {
            return Err(Error::GradientAtBoundary {
                domain: self.domain.to_string(),
            });
        }
        Ok((self.gradient_fn)(x))
    }

    /// Evaluate the Hessian where available.
    pub fn hessian(&self, x: &[f64]) -> Result<Matrix> {
        let f = self.hessian_fn.as_ref().ok_or(Error::HessianUnavailable)?;
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.domain.coords_interior(x) {
            return Err(Error::GradientAtBoundary {
                domain: self.domain.to_string(),
            });
        }
        Ok(f(x))
    }
}

/// Compare the analytic gradient against central finite differences of the
/// value at an interior point. Returns the max-abs componentwise error.
///
/// Steps `x ± h e_i` must keep every coordinate interior; on the simplex the
/// steps leave the affine hull, which is fine because the value function
/// extends componentwise.
pub fn check_gradient(gen: &ConvexGenerator, x: &[f64], h: f64) -> Result<f64> {
    if !gen.domain().contains_interior(x) {
        return Err(Error::DomainViolation(format!(
            "gradient check point must be interior to {}",
            gen.domain()
        )));
    }
    let grad = gen.gradient(x)?;
    let mut worst = 0.0f64;
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    for i in 0..x.len() {
        plus[i] = x[i] + h;
        minus[i] = x[i] - h;
        if !gen.domain().coords_interior(&plus) || !gen.domain().coords_interior(&minus) {
            return Err(Error::StepLeavesDomain);
        }
        let central = (gen.value(&plus) - gen.value(&minus)) / (2.0 * h);
        worst = worst.max((central - grad[i]).abs());
        plus[i] = x[i];
        minus[i] = x[i];
    }
    Ok(worst)
}

/// Smallest Hessian eigenvalue at an interior point; positive for a strictly
/// convex generator. Also checks the symmetry of the returned matrix.
pub fn hessian_min_eigenvalue(gen: &ConvexGenerator, x: &[f64]) -> Result<f64> {
    let h = gen.hessian(x)?;
    let asym = h.max_asymmetry();
    if asym > 1e-10 {
        return Err(Error::NonSymmetric {
            max_asymmetry: asym,
        });
    }
    Ok(h.min_eigenvalue())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_norm_value_and_gradient() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        // Hand evaluation of x^T x / 2 at (1, 2).
        assert!((gen.value(&[1.0, 2.0]) - 2.5).abs() < 1e-15);
        assert_eq!(gen.value(&[0.0, 0.0]), 0.0);
        assert_eq!(gen.gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn mahalanobis_diag_gradient() {
        let w = Matrix::diagonal(&[2.0, 2.0]);
        let gen = ConvexGenerator::squared_mahalanobis(w).unwrap();
        let g = gen.gradient(&[1.0, 0.0]).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
    }

    #[test]
    fn mahalanobis_rejects_asymmetric() {
        let w = Matrix::new(2, 2, vec![1.0, 0.5, 0.1, 1.0]).unwrap();
        match ConvexGenerator::squared_mahalanobis(w) {
            Err(Error::NonSymmetric { .. }) => {}
            other => panic!("expected NonSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn mahalanobis_rejects_indefinite() {
        let w = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        match ConvexGenerator::squared_mahalanobis(w) {
            Err(Error::NotPositiveDefinite) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn negative_entropy_values() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        // 0 ln 0 = 0 forces phi(1, 0) = 0.
        assert_eq!(gen.value(&[1.0, 0.0]), 0.0);
        let half = gen.value(&[0.5, 0.5]);
        assert!((half - (-(2.0f64).ln())).abs() < 1e-15);
        // Direct-summation oracle for (1/4, 3/4).
        let oracle = 0.25 * (0.25f64).ln() + 0.75 * (0.75f64).ln();
        assert!((gen.value(&[0.25, 0.75]) - oracle).abs() < 1e-15);
    }

    #[test]
    fn negative_entropy_gradient_at_boundary_errors() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        match gen.gradient(&[1.0, 0.0]) {
            Err(Error::GradientAtBoundary { .. }) => {}
            other => panic!("expected GradientAtBoundary, got {other:?}"),
        }
    }

    #[test]
    fn negative_entropy_needs_dim_two() {
        assert!(ConvexGenerator::negative_entropy(1).is_err());
    }

    #[test]
    fn gradient_check_quadratic_is_exact() {
        let gen = ConvexGenerator::squared_norm(3).unwrap();
        let err = check_gradient(&gen, &[0.3, -1.2, 2.0], 1e-5).unwrap();
        // Central differences are exact for quadratics up to roundoff.
        assert!(err <= 1e-8, "error {err:e}");
    }

    #[test]
    fn gradient_check_negative_entropy() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        let err = check_gradient(&gen, &[0.5, 0.5], 1e-6).unwrap();
        assert!(err <= 1e-6, "error {err:e}");
    }

    #[test]
    fn gradient_check_linear_perturbed_quadratic() {
        // phi(x) = ||x||^2/2 + a.x has gradient x + a.
        let a = [0.7, -0.3];
        let domain = ConvexDomain::full_space(2).unwrap();
        let gen = ConvexGenerator::new(
            "shifted-quadratic",
            domain,
            move |x| 0.5 * linalg::dot(x, x) + linalg::dot(&a, x),
            move |x| x.iter().zip(a).map(|(xi, ai)| xi + ai).collect(),
            None,
        );
        let err = check_gradient(&gen, &[1.0, 2.0], 1e-5).unwrap();
        assert!(err <= 1e-8, "error {err:e}");
    }

    #[test]
    fn gradient_check_step_leaving_domain_errors() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        // Step larger than the distance to the boundary.
        match check_gradient(&gen, &[1e-3, 1.0 - 1e-3], 1e-2) {
            Err(Error::StepLeavesDomain) => {}
            other => panic!("expected StepLeavesDomain, got {other:?}"),
        }
    }

    #[test]
    fn hessians_are_positive_definite_at_interior_points() {
        let gen = ConvexGenerator::negative_entropy(3).unwrap();
        let min = hessian_min_eigenvalue(&gen, &[0.2, 0.3, 0.5]).unwrap();
        assert!(min > 0.0);
        let q = ConvexGenerator::squared_norm(3).unwrap();
        assert!(hessian_min_eigenvalue(&q, &[1.0, -2.0, 0.5]).unwrap() > 0.0);
    }
}
