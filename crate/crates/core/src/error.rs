use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("determinant {0} is not positive")]
    NonPositiveDeterminant(f64),
    #[error("determinant {0} is not 1")]
    NonUnimodular(f64),
    #[error("parabolic sign test is inconclusive")]
    DegenerateClassification,
    #[error("trace is zero, so the SL(2) sign of this lift is undefined")]
    ParityUndefined,
    #[error("step {index} too large for a principal logarithm (|g' g^-1 - 1| = {size})")]
    StepTooLarge { index: usize, size: f64 },
    #[error("path under-sampled between nodes {index} and {next}", next = index + 1)]
    UnderSampled { index: usize },
    #[error("itinerary violated at node {index}: {reason}")]
    ItineraryViolation { index: usize, reason: String },
    #[error("eigenvector continuity lost at node {index}; increase N")]
    ConjugatorBranchLoss { index: usize },
    #[error("path is not nonpositive at node {index} (margin {margin})")]
    NotNonpositive { index: usize, margin: f64 },
    #[error("loop holonomy differs from the path start by {0}")]
    HolonomyMismatch(f64),
    #[error("boundary or transport is not hyperbolic: {0}")]
    NonHyperbolicBoundary(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("lift anchor {anchor} does not cover the base action {expected} mod pi")]
    BadAnchor { anchor: f64, expected: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
