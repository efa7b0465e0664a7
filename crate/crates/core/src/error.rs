use thiserror::Error;

/// Errors raised by state construction, design certification and moment evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("qubit count {requested} exceeds the configured limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },

    #[error("design `{name}` has strength {strength}, moment of order {order} requested")]
    InsufficientStrength {
        name: String,
        strength: usize,
        order: usize,
    },

    #[error("design sum needs {terms} terms, above the limit of {limit}")]
    TooManyTerms { terms: u128, limit: u128 },

    #[error("unknown design `{0}`")]
    UnknownDesign(String),

    #[error("group closure did not terminate at order {expected} (reached {reached})")]
    ClosureFailed { expected: usize, reached: usize },

    #[error("certification failed for `{name}` at t = {t}: {detail}")]
    Certification {
        name: String,
        t: usize,
        detail: String,
    },

    #[error("unsupported class/qubit combination: {0}")]
    UnsupportedClass(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
