//! The two information functionals — the Jensen gap of a convex generator and
//! the weighted mean divergence from the centroid — their signed gap, and the
//! two matching formulations of discrete mutual information.

use crate::dataset::WeightedDataset;
use crate::divergence::DivergenceFn;
use crate::error::{Error, Result};
use crate::generator::ConvexGenerator;
use crate::linalg::Matrix;

/// Jensen-gap information `I_phi(mu, X) = sum_i mu_i phi(x_i) - phi(y)` with
/// `y` the weighted centroid. Nonnegative for convex `phi`, zero exactly when
/// the supported rows are constant.
pub fn jensen_gap_information(gen: &ConvexGenerator, ds: &WeightedDataset) -> Result<f64> {
    if ds.dim() != gen.dim() {
        return Err(Error::LengthMismatch {
            expected: gen.dim(),
            got: ds.dim(),
        });
    }
    for i in 0..ds.len() {
        if !gen.domain().contains(ds.row(i)) {
            return Err(Error::DomainViolation(format!(
                "row {i} is outside the generator domain {}",
                gen.domain()
            )));
        }
    }
    let centroid = ds.centroid();
    let phi_y = gen.value(&centroid.point);
    if !phi_y.is_finite() {
        return Err(Error::DomainViolation(
            "generator value at the centroid is not finite".into(),
        ));
    }
    let mean_phi: f64 = ds
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| w * gen.value(ds.row(i)))
        .sum();
    Ok(mean_phi - phi_y)
}

/// Divergence information `I_d(mu, X) = sum_i mu_i d(x_i, y)` with `y` the
/// weighted centroid, which must lie in the relative interior.
pub fn divergence_information(d: &DivergenceFn, ds: &WeightedDataset) -> Result<f64> {
    if ds.dim() != d.dim() {
        return Err(Error::LengthMismatch {
            expected: d.dim(),
            got: ds.dim(),
        });
    }
    let centroid = ds.centroid();
    if !d.domain().contains_interior(&centroid.point) {
        return Err(Error::CentroidNotInterior);
    }
    let mut total = 0.0;
    for (i, &w) in ds.weights().iter().enumerate() {
        if w > 0.0 {
            total += w * d.evaluate(ds.row(i), &centroid.point)?;
        }
    }
    Ok(total)
}

/// Signed equivalence gap `I_phi - I_d`. Zero (to tolerance) for every
/// dataset exactly when `d` is the Bregman divergence of `gen`; the sign
/// tells whether the candidate under- or over-disperses relative to the
/// Jensen gap.
pub fn equivalence_gap(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    ds: &WeightedDataset,
) -> Result<f64> {
    Ok(jensen_gap_information(gen, ds)? - divergence_information(d, ds)?)
}

/// A finite joint distribution presented as a row marginal and per-row
/// conditionals: `p(a_i, b_j) = mu_i x_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    row_marginal: Vec<f64>,
    conditionals: Matrix,
}

impl JointDistribution {
    pub fn new(row_marginal: Vec<f64>, conditionals: Matrix) -> Result<Self> {
        if conditionals.rows() != row_marginal.len() {
            return Err(Error::InvalidJoint(format!(
                "{} conditional rows for {} marginal entries",
                conditionals.rows(),
                row_marginal.len()
            )));
        }
        if row_marginal.is_empty() || conditionals.cols() == 0 {
            return Err(Error::InvalidJoint("joint must be nonempty".into()));
        }
        validate_distribution(&row_marginal, 1e-12, "row marginal")?;
        for i in 0..conditionals.rows() {
            validate_distribution(conditionals.row(i), 1e-12, &format!("conditional row {i}"))?;
        }
        let joint_sum: f64 = row_marginal
            .iter()
            .enumerate()
            .map(|(i, &mu)| mu * conditionals.row(i).iter().sum::<f64>())
            .sum();
        if (joint_sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidJoint(format!(
                "implied joint sums to {joint_sum}, expected 1"
            )));
        }
        Ok(Self {
            row_marginal,
            conditionals,
        })
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn conditionals(&self) -> &Matrix {
        &self.conditionals
    }

    pub fn rows(&self) -> usize {
        self.row_marginal.len()
    }

    pub fn cols(&self) -> usize {
        self.conditionals.cols()
    }

    /// Column marginal `y_j = sum_i mu_i x_ij`.
    pub fn column_marginal(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.cols()];
        for (i, &mu) in self.row_marginal.iter().enumerate() {
            for (j, slot) in y.iter_mut().enumerate() {
                *slot += mu * self.conditionals.get(i, j);
            }
        }
        y
    }
}

fn validate_distribution(p: &[f64], tol: f64, what: &str) -> Result<()> {
    if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidJoint(format!(
            "{what} has negative or non-finite entry {v}"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidJoint(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// Mutual information in nats via the entropy-reduction form
/// `I(A;B) = H(B) - H(B|A)`, computed as
/// `sum_i mu_i sum_j x_ij ln x_ij - sum_j y_j ln y_j`.
pub fn mutual_information_entropy_reduction(j: &JointDistribution) -> f64 {
    let neg_h_cond: f64 = j
        .row_marginal()
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > 0.0)
        .map(|(i, &mu)| mu * j.conditionals().row(i).iter().map(|&v| xlnx(v)).sum::<f64>())
        .sum();
    let neg_h_marginal: f64 = j.column_marginal().iter().map(|&v| xlnx(v)).sum();
    neg_h_cond - neg_h_marginal
}

/// Mutual information in nats as the weighted sum of KL divergences of the
/// conditional rows from the column marginal. Columns with zero marginal
/// mass carry `x_ij = 0` for every supported row, so they are skipped under
/// the `0 ln 0 = 0` convention.
pub fn mutual_information_divergence_form(j: &JointDistribution) -> f64 {
    let y = j.column_marginal();
    j.row_marginal()
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > 0.0)
        .map(|(i, &mu)| {
            let row = j.conditionals().row(i);
            let kl: f64 = row
                .iter()
                .zip(&y)
                .filter(|(&x, &yj)| x > 0.0 && yj > 0.0)
                .map(|(&x, &yj)| x * (x / yj).ln())
                .sum();
            mu * kl
        })
        .sum()
}
