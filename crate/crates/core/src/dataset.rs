//! Weighted datasets: a probability vector of weights over rows of points in
//! a convex domain, with the weighted centroid.

use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Tolerance on the weight sum: weights must form a probability vector.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Weights `mu` over `n` rows `x_i` of a point matrix, all rows in `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDataset {
    domain: ConvexDomain,
    weights: Vec<f64>,
    points: Matrix,
}

/// A centroid together with the result of the relative-interior test.
/// Interior failure is not an error here; consumers that need an interior
/// centroid (divergence information) check the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub point: Vec<f64>,
    pub interior: bool,
}

impl WeightedDataset {
    pub fn new(domain: ConvexDomain, weights: Vec<f64>, points: Matrix) -> Result<Self> {
        if points.rows() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: points.rows(),
                got: weights.len(),
            });
        }
        if points.cols() != domain.dim() {
            return Err(Error::LengthMismatch {
                expected: domain.dim(),
                got: points.cols(),
            });
        }
        if weights.is_empty() {
            return Err(Error::InvalidWeights("dataset must be nonempty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("negative or non-finite weight {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        for i in 0..points.rows() {
            if !domain.contains(points.row(i)) {
                return Err(Error::DomainViolation(format!(
                    "row {i} is outside {domain}"
                )));
            }
        }
        Ok(Self {
            domain,
            weights,
            points,
        })
    }

    /// Uniform weights `1/n`.
    pub fn with_uniform_weights(domain: ConvexDomain, points: Matrix) -> Result<Self> {
        let n = points.rows();
        if n == 0 {
            return Err(Error::InvalidWeights("dataset must be nonempty".into()));
        }
        let w = vec![1.0 / n as f64; n];
        Self::new(domain, w, points)
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// The weighted centroid `y = sum_i mu_i x_i`, flagged with the
    /// relative-interior test.
    pub fn centroid(&self) -> Centroid {
        let l = self.dim();
        let mut point = vec![0.0; l];
        for (i, &w) in self.weights.iter().enumerate() {
            let row = self.points.row(i);
            for (p, &x) in point.iter_mut().zip(row) {
                *p += w * x;
            }
        }
        let interior = self.domain.contains_interior(&point);
        Centroid { point, interior }
    }

    /// Largest coordinate spread `max_j (max_i x_ij - min_i x_ij)` over the
    /// rows carrying positive weight.
    pub fn support_spread(&self) -> f64 {
        let mut spread = 0.0f64;
        for j in 0..self.dim() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..self.len() {
                if self.weights[i] > 0.0 {
                    let v = self.points.get(i, j);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            if hi >= lo {
                spread = spread.max(hi - lo);
            }
        }
        spread
    }
}
