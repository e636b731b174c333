//! Convex domains the library works over: all of R^l, the positive orthant,
//! and the probability simplex. Each domain knows its membership test, its
//! relative interior, and a Euclidean projection used for probe placement.

use crate::error::{Error, Result};

/// Default tolerance for membership tests.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Default margin defining the relative interior of the simplex and the
/// positive orthant. Keeps logarithms and gradients finite in f64.
pub const DEFAULT_INTERIOR_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    FullSpace,
    PositiveOrthant,
    Simplex,
}

impl std::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainKind::FullSpace => write!(f, "full-space"),
            DomainKind::PositiveOrthant => write!(f, "positive-orthant"),
            DomainKind::Simplex => write!(f, "simplex"),
        }
    }
}

/// A convex set together with its relative interior.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    kind: DomainKind,
    dim: usize,
    membership_tol: f64,
    interior_margin: f64,
}

impl ConvexDomain {
    pub fn new(kind: DomainKind, dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDimension { min: 1, got: dim });
        }
        Ok(Self {
            kind,
            dim,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            interior_margin: DEFAULT_INTERIOR_MARGIN,
        })
    }

    pub fn full_space(dim: usize) -> Result<Self> {
        Self::new(DomainKind::FullSpace, dim)
    }

    pub fn positive_orthant(dim: usize) -> Result<Self> {
        Self::new(DomainKind::PositiveOrthant, dim)
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        Self::new(DomainKind::Simplex, dim)
    }

    pub fn with_membership_tol(mut self, tol: f64) -> Self {
        assert!(tol >= 0.0, "membership tolerance must be nonnegative");
        self.membership_tol = tol;
        self
    }

    pub fn with_interior_margin(mut self, margin: f64) -> Self {
        assert!(margin > 0.0, "interior margin must be positive");
        self.interior_margin = margin;
        self
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn membership_tol(&self) -> f64 {
        self.membership_tol
    }

    pub fn interior_margin(&self) -> f64 {
        self.interior_margin
    }

    /// Same kind and dimension (tolerances may differ).
    pub fn same_shape(&self, other: &ConvexDomain) -> bool {
        self.kind == other.kind && self.dim == other.dim
    }

    /// Membership in the closed set C.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            DomainKind::FullSpace => true,
            DomainKind::PositiveOrthant => x.iter().all(|&v| v >= -self.membership_tol),
            DomainKind::Simplex => {
                x.iter().all(|&v| v >= -self.membership_tol)
                    && (x.iter().sum::<f64>() - 1.0).abs() <= self.membership_tol
            }
        }
    }

    /// Membership in the relative interior C*.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            DomainKind::FullSpace => true,
            DomainKind::PositiveOrthant => x.iter().all(|&v| v >= self.interior_margin),
            DomainKind::Simplex => {
                x.iter().all(|&v| v >= self.interior_margin)
                    && (x.iter().sum::<f64>() - 1.0).abs() <= self.membership_tol
            }
        }
    }

    /// Componentwise interior test that ignores any affine constraint. This is
    /// what coordinate-wise finite-difference steps need: on the simplex,
    /// x + h*e_i leaves the affine hull but the generator is still evaluable
    /// as long as every coordinate stays above the margin.
    pub fn coords_interior(&self, x: &[f64]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            DomainKind::FullSpace => true,
            DomainKind::PositiveOrthant | DomainKind::Simplex => {
                x.iter().all(|&v| v >= self.interior_margin)
            }
        }
    }

    /// Euclidean projection onto the closed set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "projection dimension mismatch");
        match self.kind {
            DomainKind::FullSpace => x.to_vec(),
            DomainKind::PositiveOrthant => x.iter().map(|&v| v.max(0.0)).collect(),
            DomainKind::Simplex => project_to_simplex(x),
        }
    }

    /// Push a point into the relative interior: coordinates are raised to the
    /// interior margin and, on the simplex, renormalized to unit sum. Returns
    /// the adjusted point and whether any adjustment happened.
    pub fn clamp_to_interior(&self, x: &[f64]) -> (Vec<f64>, bool) {
        assert_eq!(x.len(), self.dim, "clamp dimension mismatch");
        match self.kind {
            DomainKind::FullSpace => (x.to_vec(), false),
            DomainKind::PositiveOrthant => {
                let mut changed = false;
                let out = x
                    .iter()
                    .map(|&v| {
                        if v < self.interior_margin {
                            changed = true;
                            self.interior_margin
                        } else {
                            v
                        }
                    })
                    .collect();
                (out, changed)
            }
            DomainKind::Simplex => {
                let mut changed = false;
                let mut out: Vec<f64> = x
                    .iter()
                    .map(|&v| {
                        if v < self.interior_margin {
                            changed = true;
                            self.interior_margin
                        } else {
                            v
                        }
                    })
                    .collect();
                if changed {
                    let sum: f64 = out.iter().sum();
                    for v in &mut out {
                        *v /= sum;
                    }
                    // Renormalization can nudge a coordinate a few ulps below
                    // the margin; the final clamp restores it without moving
                    // the sum past the membership tolerance.
                    for v in &mut out {
                        if *v < self.interior_margin {
                            *v = self.interior_margin;
                        }
                    }
                }
                (out, changed)
            }
        }
    }
}

impl std::fmt::Display for ConvexDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.kind, self.dim)
    }
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
/// The active set {k : u_k > (cumsum_k - 1)/k} is always a prefix of the
/// descending sort, so the scan stops at the first violation.
fn project_to_simplex(x: &[f64]) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in u.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - 1.0) / (k as f64 + 1.0);
        if v > t {
            theta = t;
        } else {
            break;
        }
    }
    x.iter().map(|&v| (v - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_must_be_positive() {
        assert!(ConvexDomain::full_space(0).is_err());
        assert!(ConvexDomain::simplex(1).is_ok());
    }

    #[test]
    fn simplex_membership() {
        let d = ConvexDomain::simplex(2).unwrap();
        assert!(d.contains(&[0.5, 0.5]));
        assert!(d.contains(&[1.0, 0.0]));
        assert!(d.contains(&[1.0 + 1e-10, -1e-10]));
        assert!(!d.contains(&[0.6, 0.6]));
        assert!(!d.contains(&[-0.1, 1.1]));
    }

    #[test]
    fn simplex_interior() {
        let d = ConvexDomain::simplex(2).unwrap();
        assert!(d.contains_interior(&[0.5, 0.5]));
        assert!(!d.contains_interior(&[1.0, 0.0]));
        assert!(!d.contains_interior(&[1.0 - 1e-12, 1e-12]));
    }

    #[test]
    fn orthant_interior_margin() {
        let d = ConvexDomain::positive_orthant(2).unwrap();
        assert!(d.contains(&[0.0, 3.0]));
        assert!(!d.contains_interior(&[0.0, 3.0]));
        assert!(d.contains_interior(&[1e-6, 3.0]));
    }

    #[test]
    fn full_space_is_everything_finite() {
        let d = ConvexDomain::full_space(3).unwrap();
        assert!(d.contains(&[-5.0, 0.0, 7.0]));
        assert!(d.contains_interior(&[-5.0, 0.0, 7.0]));
        assert!(!d.contains(&[f64::NAN, 0.0, 0.0]));
        assert!(!d.contains(&[1.0, 2.0]));
    }

    #[test]
    fn simplex_projection_restores_membership() {
        let d = ConvexDomain::simplex(3).unwrap();
        let p = d.project(&[0.5, 0.6, 0.2]);
        assert!(d.contains(&p));
        let q = d.project(&[1.4, -0.3, 0.1]);
        assert!(d.contains(&q));
        // Projection of a point already on the simplex is the identity.
        let r = d.project(&[0.2, 0.3, 0.5]);
        for (a, b) in r.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn clamp_to_interior_keeps_simplex_sum() {
        let d = ConvexDomain::simplex(3).unwrap();
        let (p, changed) = d.clamp_to_interior(&[0.0, 0.0, 1.0]);
        assert!(changed);
        assert!(d.contains_interior(&p));
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= d.membership_tol());
        let (q, changed2) = d.clamp_to_interior(&[0.2, 0.3, 0.5]);
        assert!(!changed2);
        assert_eq!(q, vec![0.2, 0.3, 0.5]);
    }
}
