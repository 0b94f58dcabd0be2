use thiserror::Error;

/// Errors produced by the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A matrix or vector has the wrong dimensions.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Channel file could not be parsed or violates the schema.
    #[error("input error: {0}")]
    Input(String),

    /// All polynomial coefficients are zero.
    #[error("degenerate polynomial: all coefficients are zero")]
    DegeneratePolynomial,

    /// A matrix that must be invertible is numerically singular.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// A floating point quantity that is positive analytically came out nonpositive.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The closed form disagrees with a direct evaluation, or a branch that
    /// must exist was not found.
    #[error("internal inconsistency: {message}")]
    Inconsistency {
        message: String,
        closed_form_nats: Option<f64>,
        objective_nats: Option<f64>,
    },
}

impl Error {
    pub(crate) fn inconsistency(message: impl Into<String>) -> Self {
        Error::Inconsistency {
            message: message.into(),
            closed_form_nats: None,
            objective_nats: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
