use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0} (must be at least 1)")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid query radius {0} (must be > 0)")]
    InvalidRadius(f64),
    #[error("inner index {m} outside 1..={tau}")]
    IndexOutOfRange { m: usize, tau: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("environment has no {0} oracle")]
    OracleAbsent(&'static str),
    #[error("algorithm {0} is not supported by this environment")]
    UnsupportedAlgorithm(&'static str),
    #[error("iterate diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("domain error: {0}")]
    Domain(&'static str),
}
