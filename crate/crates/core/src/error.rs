//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported dimension {0} (only 2 and 4 are modeled)")]
    UnsupportedDimension(usize),
    #[error("angle {name} = {value} outside valid range [{lo}, {hi}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("value {name} = {value} is not finite")]
    NotFinite { name: &'static str, value: f64 },
    #[error("loop visibility {0} outside [0, 1]")]
    LoopVisibilityOutOfRange(f64),
    #[error("priors p2 = {p2} exceeds p1 = {p1}; the model assumes p2 <= p1")]
    PriorsOutOfOrder { p1: f64, p2: f64 },
    #[error("arccos argument {0} exceeds 1 beyond numerical tolerance")]
    ArccosDomain(f64),
    #[error("POVM set must be nonempty")]
    EmptyPovm,
    #[error("POVM is invalid: {0}")]
    InvalidPovm(String),
    #[error("photon budget must be positive, got {0}")]
    ZeroPhotonBudget(f64),
    #[error("phase sweep needs at least 2 distinct phases")]
    DegeneratePhaseSweep,
    #[error("all counts are zero; estimator undefined")]
    AllCountsZero,
    #[error("estimator denominator is zero")]
    ZeroDenominator,
    #[error("missing blocked-path runs for {0}")]
    MissingBlockedRuns(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
