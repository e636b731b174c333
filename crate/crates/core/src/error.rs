//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by domain validation, generators, divergences,
/// informations, certification, and clustering.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NonSymmetric { max_asymmetry: f64 },

    #[error("matrix is not positive-definite")]
    NotPositiveDefinite,

    #[error("point is outside the domain: {0}")]
    DomainViolation(String),

    #[error("gradient requested at a boundary point of {domain}")]
    GradientAtBoundary { domain: String },

    #[error("finite-difference step leaves the domain")]
    StepLeavesDomain,

    #[error("second argument must lie in the relative interior of the domain")]
    SecondArgumentNotInterior,

    #[error("second argument has a coordinate below the interior margin")]
    SecondArgumentHasZero,

    #[error("generator does not provide a Hessian")]
    HessianUnavailable,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("dataset centroid is not in the relative interior")]
    CentroidNotInterior,

    #[error("sampler domain mismatch: {0}")]
    SamplerDomainMismatch(String),

    #[error("probe design matrix is rank-deficient (condition {condition:e})")]
    RankDeficientProbes { condition: f64 },

    #[error("residual is not affine in its first argument (max fit residual {residual:e})")]
    NotAffine { residual: f64 },

    #[error("divergence does not claim to be the Bregman divergence of a generator")]
    NoBregmanClaim,

    #[error("divergence fails a sampled validity check: {0}")]
    NotADivergence(String),

    #[error("cluster {0} has no assigned points")]
    EmptyCluster(usize),

    #[error("k={k} exceeds the number of distinct data rows ({distinct})")]
    InsufficientDistinctRows { k: usize, distinct: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
