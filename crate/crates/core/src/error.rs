use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("point outside domain: preimage radius {radius}")]
    OutsideDomain { radius: f64 },

    #[error("point {index} outside domain: preimage radius {radius}")]
    OutsideDomainAt { index: usize, radius: f64 },

    #[error("insufficient sample: {available} points for {required} nodes")]
    InsufficientSample { available: usize, required: usize },

    #[error("degenerate constraints: rank(C) = {rank} < {expected}")]
    DegenerateConstraints { rank: usize, expected: usize },

    #[error("degenerate design: rank(M) = {rank} < {expected}")]
    DegenerateDesign { rank: usize, expected: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("evaluation failed at node {index}: {reason}")]
    Evaluation { index: usize, reason: String },
}

impl Error {
    /// True for failures caused by rank deficiency or conditioning rather
    /// than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateConstraints { .. } | Error::DegenerateDesign { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
