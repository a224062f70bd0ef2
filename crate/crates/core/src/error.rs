use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("object mismatch in {context}: expected {expected}, found {found}")]
    ObjectMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("instance mismatch: cannot combine {left} with {right}")]
    InstanceMismatch { left: String, right: String },
    #[error("bad factor selection: {0}")]
    BadFactorSelection(String),
    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("naturality violation: {0}")]
    NaturalityViolation(String),
    #[error("precondition violation: {0}")]
    PreconditionViolation(String),
    #[error("{entity} violates {law}: {detail}")]
    Validation {
        entity: String,
        law: String,
        detail: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn mismatch(
        context: impl Into<String>,
        expected: impl std::fmt::Display,
        found: impl std::fmt::Display,
    ) -> Self {
        Error::ObjectMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn validation(
        entity: impl Into<String>,
        law: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Error::Validation {
            entity: entity.into(),
            law: law.into(),
            detail: detail.into(),
        }
    }
}
