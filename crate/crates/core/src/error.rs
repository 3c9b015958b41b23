use thiserror::Error;

/// Errors produced by the zeta engine and its supporting modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("series has no valuation certificate (rho, c)")]
    CertificateMissing,

    #[error("series has no declared support bound")]
    SupportBoundMissing,

    #[error("dimension {n} exceeds the configured maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("face {0} is not an intersection of facets")]
    DegenerateFace(usize),

    #[error("f is degenerate on face {face} at point {point:?}")]
    DegenerateInput { face: usize, point: Vec<u64> },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("enumeration of {requested} points exceeds the limit {limit}")]
    EnumLimitExceeded { requested: u128, limit: u64 },

    #[error("ball recursion exceeded depth {0}")]
    DepthLimitExceeded(u32),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),
}

impl ZetaError {
    /// Stable machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ZetaError::NotPrime(_) => "NotPrime",
            ZetaError::PreconditionViolated(_) => "PreconditionViolated",
            ZetaError::CertificateMissing => "CertificateMissing",
            ZetaError::SupportBoundMissing => "SupportBoundMissing",
            ZetaError::DimensionTooLarge { .. } => "DimensionTooLarge",
            ZetaError::DegenerateFace(_) => "DegenerateFace",
            ZetaError::DegenerateInput { .. } => "DegenerateInput",
            ZetaError::HypothesisViolated(_) => "HypothesisViolated",
            ZetaError::EnumLimitExceeded { .. } => "EnumLimitExceeded",
            ZetaError::DepthLimitExceeded(_) => "DepthLimitExceeded",
            ZetaError::Parse { .. } => "ParseError",
            ZetaError::Validation(_) => "ValidationError",
        }
    }
}

pub type Result<T> = std::result::Result<T, ZetaError>;
