//! Divergences: the generic Bregman construction from a generator, the
//! closed-form specializations (KL, squared Mahalanobis), a black-box
//! divergence interface, and the local quadratic-expansion check.

use std::sync::Arc;

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::generator::ConvexGenerator;
use crate::linalg::{self, Matrix};
use crate::sampler;

type EvalFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A two-argument comparison function `d(x, y)` with `x` in the domain and
/// `y` in its relative interior. May or may not be a Bregman divergence;
/// the certifier decides.
#[derive(Clone)]
pub struct DivergenceFn {
    name: String,
    domain: ConvexDomain,
    eval_fn: EvalFn,
    claims_bregman_of: Option<ConvexGenerator>,
}

impl std::fmt::Debug for DivergenceFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DivergenceFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field(
                "claims_bregman_of",
                &self.claims_bregman_of.as_ref().map(ConvexGenerator::name),
            )
            .finish()
    }
}

impl DivergenceFn {
    pub fn new(
        name: impl Into<String>,
        domain: ConvexDomain,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eval_fn: Arc::new(eval),
            claims_bregman_of: None,
        }
    }

    fn with_claim(mut self, gen: ConvexGenerator) -> Self {
        self.claims_bregman_of = Some(gen);
        self
    }

    /// The Bregman divergence induced by `gen` via
    /// `d(x, y) = phi(x) - phi(y) - grad phi(y) . (x - y)`.
    pub fn bregman(gen: &ConvexGenerator) -> Self {
        let value_gen = gen.clone();
        let name = format!("bregman[{}]", gen.name());
        let domain = gen.domain().clone();
        Self::new(name, domain, move |x, y| {
            let grad = value_gen
                .gradient(y)
                .expect("second argument was checked interior");
            let diff = linalg::sub(x, y);
            value_gen.value(x) - value_gen.value(y) - linalg::dot(&grad, &diff)
        })
        .with_claim(gen.clone())
    }

    /// Closed-form KL divergence on the simplex. Claims the negative-entropy
    /// generator, which induces it.
    pub fn kl(dim: usize) -> Result<Self> {
        let gen = ConvexGenerator::negative_entropy(dim)?;
        let domain = gen.domain().clone();
        Ok(Self::new("kl".to_string(), domain, |x, y| {
            kl_sum(x, y)
        })
        .with_claim(gen))
    }

    /// Generalized KL on the positive orthant:
    /// `sum_i x_i ln(x_i / y_i) - x_i + y_i`.
    pub fn generalized_kl(dim: usize) -> Result<Self> {
        let domain = ConvexDomain::positive_orthant(dim)?;
        Ok(Self::new("generalized-kl".to_string(), domain, |x, y| {
            kl_sum(x, y) - x.iter().sum::<f64>() + y.iter().sum::<f64>()
        }))
    }

    /// Closed-form `||x - y||^2 / 2`, the Bregman divergence of the squared
    /// norm.
    pub fn squared_euclidean(dim: usize) -> Result<Self> {
        let gen = ConvexGenerator::squared_norm(dim)?;
        let domain = gen.domain().clone();
        Ok(Self::new("sqeuclidean".to_string(), domain, |x, y| {
            let d = linalg::sub(x, y);
            0.5 * linalg::dot(&d, &d)
        })
        .with_claim(gen))
    }

    /// Absolute distance on the line; a valid divergence that is not Bregman.
    pub fn abs_distance() -> Self {
        let domain = ConvexDomain::full_space(1).expect("dimension 1 is valid");
        Self::new("abs".to_string(), domain, |x, y| (x[0] - y[0]).abs())
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

    pub fn claims_bregman_of(&self) -> Option<&ConvexGenerator> {
        self.claims_bregman_of.as_ref()
    }

    /// Evaluate `d(x, y)`, enforcing `x` in the domain and `y` in its
    /// relative interior.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::DomainViolation(format!(
                "first argument is outside {}",
                self.domain
            )));
        }
        if !self.domain.contains_interior(y) {
            return Err(Error::SecondArgumentNotInterior);
        }
        Ok((self.eval_fn)(x, y))
    }
}

/// Construct the Bregman divergence of a generator. Free-function spelling of
/// [`DivergenceFn::bregman`].
pub fn bregman_from_generator(gen: &ConvexGenerator) -> DivergenceFn {
    DivergenceFn::bregman(gen)
}

fn kl_sum(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| if xi > 0.0 { xi * (xi / yi).ln() } else { 0.0 })
        .sum()
}

/// KL divergence of two simplex vectors, `sum_i x_i ln(x_i / y_i)` with
/// `0 ln 0 = 0`. Zeros are allowed in `x`; every coordinate of `y` must sit
/// above the interior margin. Nats.
///
/// ```
/// let v = bregman::kl_divergence(&[1.0, 0.0], &[0.5, 0.5])?;
/// assert!((v - 2.0f64.ln()).abs() < 1e-15);
/// # Ok::<(), bregman::Error>(())
/// ```
pub fn kl_divergence(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let domain = ConvexDomain::simplex(x.len())?;
    if !domain.contains(x) {
        return Err(Error::DomainViolation(format!(
            "first argument is outside {domain}"
        )));
    }
    if !domain.contains_interior(y) {
        return Err(Error::SecondArgumentHasZero);
    }
    Ok(kl_sum(x, y))
}

/// Generalized KL on the positive orthant: `sum_i x_i ln(x_i/y_i) - x_i + y_i`.
pub fn generalized_kl_divergence(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let domain = ConvexDomain::positive_orthant(x.len())?;
    if !domain.contains(x) {
        return Err(Error::DomainViolation(format!(
            "first argument is outside {domain}"
        )));
    }
    if !domain.contains_interior(y) {
        return Err(Error::SecondArgumentHasZero);
    }
    Ok(kl_sum(x, y) - x.iter().sum::<f64>() + y.iter().sum::<f64>())
}

/// Closed-form `0.5 (x - y)^T W (x - y)`, exactly what the generic Bregman
/// construction yields for `phi(x) = x^T W x / 2`. Note the factor 1/2: this
/// library keeps the construction and the closed form identical; callers
/// wanting the unhalved quadratic form pass `2 W`.
pub fn squared_mahalanobis(w: &Matrix, x: &[f64], y: &[f64]) -> Result<f64> {
    let asym = w.max_asymmetry();
    if asym > 1e-10 {
        return Err(Error::NonSymmetric {
            max_asymmetry: asym,
        });
    }
    if w.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    if x.len() != w.rows() || y.len() != w.rows() {
        return Err(Error::LengthMismatch {
            expected: w.rows(),
            got: if x.len() != w.rows() { x.len() } else { y.len() },
        });
    }
    let d = linalg::sub(x, y);
    Ok(0.5 * linalg::dot(&d, &w.matvec(&d)))
}

/// One entry of the local-expansion sweep: the scale `s` and the ratio
/// `|d_phi(x + s*delta, x) - 0.5 (s*delta)^T H (s*delta)| / ||s*delta||^2`.
pub type MetricRatio = (f64, f64);

/// Check the small-step quadratic expansion of a Bregman divergence against
/// the Hessian form at `x`: the returned ratios tend to zero as the scale
/// shrinks, since the remainder is o(||delta||^2).
pub fn local_metric_check(
    gen: &ConvexGenerator,
    x: &[f64],
    delta: &[f64],
    scales: &[f64],
) -> Result<Vec<MetricRatio>> {
    if !gen.has_hessian() {
        return Err(Error::HessianUnavailable);
    }
    if delta.len() != gen.dim() {
        return Err(Error::LengthMismatch {
            expected: gen.dim(),
            got: delta.len(),
        });
    }
    if !gen.domain().contains_interior(x) {
        return Err(Error::DomainViolation(format!(
            "expansion point must be interior to {}",
            gen.domain()
        )));
    }
    for &s in scales {
        assert!(s > 0.0, "scales must be positive");
        let stepped = linalg::axpy(s, delta, x);
        if !gen.domain().contains(&stepped) {
            return Err(Error::StepLeavesDomain);
        }
    }
    let d = DivergenceFn::bregman(gen);
    let hess = gen.hessian(x)?;
    let mut out = Vec::with_capacity(scales.len());
    for &s in scales {
        let step = linalg::scale(s, delta);
        let norm_sq = linalg::dot(&step, &step);
        if norm_sq == 0.0 {
            out.push((s, 0.0));
            continue;
        }
        let stepped = linalg::axpy(1.0, &step, x);
        let div = d.evaluate(&stepped, x)?;
        let quad = 0.5 * linalg::dot(&step, &hess.matvec(&step));
        out.push((s, (div - quad).abs() / norm_sq));
    }
    Ok(out)
}

/// Sampled necessary conditions for `d` to be a divergence: nonnegative on
/// sampled pairs, (near) zero on the diagonal, and strictly positive on
/// separated pairs. A sampled pass proves nothing; a failure is a refutation.
pub fn validate_sampled(d: &DivergenceFn, seed: u64, pairs: usize) -> Result<()> {
    let radius = sampler::DEFAULT_BOX_RADIUS;
    for k in 0..pairs {
        let mut rng = sampler::stream_rng(seed, k as u64);
        let x = sampler::sample_interior_point(&mut rng, d.domain(), radius);
        let y = sampler::sample_interior_point(&mut rng, d.domain(), radius);
        let dxy = d.evaluate(&x, &y)?;
        if dxy < -1e-12 {
            return Err(Error::NotADivergence(format!(
                "d(x, y) = {dxy:e} < 0 on sampled pair {k}"
            )));
        }
        let dyy = d.evaluate(&y, &y)?;
        if dyy.abs() > 1e-12 {
            return Err(Error::NotADivergence(format!(
                "d(y, y) = {dyy:e} != 0 on sampled point {k}"
            )));
        }
        let separation = linalg::norm2(&linalg::sub(&x, &y));
        if separation >= 1e-3 && dxy <= 0.0 {
            return Err(Error::NotADivergence(format!(
                "d(x, y) = {dxy:e} not positive at separation {separation:e} (pair {k})"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bregman_of_squared_norm_matches_hand_value() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = DivergenceFn::bregman(&gen);
        // phi(x) - phi(0) - 0 = 2.5 at x = (1, 2).
        let v = d.evaluate(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert!((v - 2.5).abs() < 1e-15);
    }

    #[test]
    fn bregman_vanishes_on_diagonal() {
        let gen = ConvexGenerator::negative_entropy(3).unwrap();
        let d = DivergenceFn::bregman(&gen);
        let y = [0.2, 0.3, 0.5];
        assert!(d.evaluate(&y, &y).unwrap().abs() < 1e-15);
    }

    #[test]
    fn bregman_of_negative_entropy_is_kl() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        let d = DivergenceFn::bregman(&gen);
        let v = d.evaluate(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        // Direct-summation oracle sum_i x_i ln(x_i / y_i).
        let oracle = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.143841).abs() < 1e-6);
    }

    #[test]
    fn bregman_rejects_boundary_second_argument() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        let d = DivergenceFn::bregman(&gen);
        match d.evaluate(&[0.5, 0.5], &[1.0, 0.0]) {
            Err(Error::SecondArgumentNotInterior) => {}
            other => panic!("expected SecondArgumentNotInterior, got {other:?}"),
        }
    }

    #[test]
    fn kl_divergence_examples() {
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        let v = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((v - (2.0f64).ln()).abs() < 1e-15);
        let w = kl_divergence(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        let oracle = 0.5 * (2.0f64).ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((w - oracle).abs() < 1e-15);
    }

    #[test]
    fn kl_rejects_zero_in_second_argument() {
        match kl_divergence(&[0.5, 0.5], &[1.0, 0.0]) {
            Err(Error::SecondArgumentHasZero) => {}
            other => panic!("expected SecondArgumentHasZero, got {other:?}"),
        }
    }

    #[test]
    fn kl_agrees_with_bregman_form() {
        let gen = ConvexGenerator::negative_entropy(3).unwrap();
        let d = DivergenceFn::bregman(&gen);
        let x = [0.1, 0.2, 0.7];
        let y = [0.3, 0.3, 0.4];
        let closed = kl_divergence(&x, &y).unwrap();
        let generic = d.evaluate(&x, &y).unwrap();
        assert!((closed - generic).abs() < 1e-10);
    }

    #[test]
    fn squared_mahalanobis_examples() {
        let id = Matrix::identity(2);
        let v = squared_mahalanobis(&id, &[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert!((v - 2.5).abs() < 1e-15);
        assert_eq!(
            squared_mahalanobis(&id, &[1.0, 2.0], &[1.0, 2.0]).unwrap(),
            0.0
        );
        let w = Matrix::diagonal(&[2.0, 1.0]);
        let u = squared_mahalanobis(&w, &[1.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!((u - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squared_mahalanobis_matches_generic_construction() {
        let w = Matrix::new(2, 2, vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        let gen = ConvexGenerator::squared_mahalanobis(w.clone()).unwrap();
        let d = DivergenceFn::bregman(&gen);
        let x = [1.0, -2.0];
        let y = [0.5, 0.25];
        let closed = squared_mahalanobis(&w, &x, &y).unwrap();
        let generic = d.evaluate(&x, &y).unwrap();
        assert!((closed - generic).abs() < 1e-12);
    }

    #[test]
    fn generalized_kl_is_nonnegative_off_simplex() {
        let x = [0.5, 2.0];
        let y = [1.0, 1.0];
        let v = generalized_kl_divergence(&x, &y).unwrap();
        assert!(v > 0.0);
        let same = generalized_kl_divergence(&y, &y).unwrap();
        assert!(same.abs() < 1e-15);
    }

    #[test]
    fn local_metric_quadratic_is_exact() {
        // At the center both paths evaluate the same quadratic form, so the
        // remainder is exactly zero; at a generic point it sits at the
        // cancellation floor eps * |phi(x)| / ||s delta||^2.
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let at_zero =
            local_metric_check(&gen, &[0.0, 0.0], &[1.0, 2.0], &[0.1, 0.01, 1e-3, 1e-4]).unwrap();
        for (_, r) in at_zero {
            assert_eq!(r, 0.0);
        }
        let generic =
            local_metric_check(&gen, &[0.5, -1.0], &[1.0, 2.0], &[0.1, 0.01, 0.001]).unwrap();
        for (_, r) in generic {
            assert!(r <= 1e-10, "quadratic expansion should be exact, got {r:e}");
        }
    }

    #[test]
    fn local_metric_entropy_ratio_decreases() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        let scales = [1e-1, 1e-2, 1e-3, 1e-4];
        let ratios = local_metric_check(&gen, &[0.5, 0.5], &[1.0, -1.0], &scales).unwrap();
        for pair in ratios.windows(2) {
            assert!(
                pair[1].1 < pair[0].1,
                "ratio should decrease with scale: {ratios:?}"
            );
        }
    }

    #[test]
    fn local_metric_zero_direction() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let ratios = local_metric_check(&gen, &[0.0, 0.0], &[0.0, 0.0], &[0.5]).unwrap();
        assert_eq!(ratios, vec![(0.5, 0.0)]);
    }

    #[test]
    fn local_metric_requires_hessian() {
        let domain = ConvexDomain::full_space(1).unwrap();
        let gen = ConvexGenerator::new(
            "no-hessian",
            domain,
            |x| x[0] * x[0],
            |x| vec![2.0 * x[0]],
            None,
        );
        match local_metric_check(&gen, &[0.0], &[1.0], &[0.1]) {
            Err(Error::HessianUnavailable) => {}
            other => panic!("expected HessianUnavailable, got {other:?}"),
        }
    }

    #[test]
    fn local_metric_step_must_stay_inside() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        // Direction off the tangent plane leaves the simplex at any scale.
        match local_metric_check(&gen, &[0.5, 0.5], &[1.0, 0.0], &[0.1]) {
            Err(Error::StepLeavesDomain) => {}
            other => panic!("expected StepLeavesDomain, got {other:?}"),
        }
    }

    #[test]
    fn validity_sampling_accepts_builtins_and_rejects_signed() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        validate_sampled(&DivergenceFn::bregman(&gen), 3, 200).unwrap();
        validate_sampled(&DivergenceFn::kl(3).unwrap(), 3, 200).unwrap();
        validate_sampled(&DivergenceFn::abs_distance(), 3, 200).unwrap();

        let domain = ConvexDomain::full_space(1).unwrap();
        let signed = DivergenceFn::new("signed-difference", domain, |x, y| x[0] - y[0]);
        assert!(matches!(
            validate_sampled(&signed, 3, 200),
            Err(Error::NotADivergence(_))
        ));
    }
}
