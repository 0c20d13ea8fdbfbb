use thiserror::Error;

/// Errors from matrix construction and capacity math.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MimoError {
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("matrix shape {rows}x{cols} does not match {expected} entries")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("matrix dimensions are incompatible: {lhs} vs {rhs}")]
    DimensionMismatch { lhs: String, rhs: String },
    #[error("matrix must be non-empty")]
    Empty,
    #[error("matrix must be square for this operation")]
    NotSquare,
    #[error("reference amplitude must be positive (got {0})")]
    ZeroReferenceAmplitude(f64),
    #[error("snr must be positive (got {0})")]
    NonPositiveSnr(f64),
    #[error("tolerance must be positive (got {0})")]
    NonPositiveTolerance(f64),
    #[error("stream count must be at least 1")]
    NoStreams,
    #[error("sounding budget times must be non-negative and coherence positive")]
    InvalidBudget,
    #[error("SVD iteration failed to converge")]
    SvdNoConvergence,
}
