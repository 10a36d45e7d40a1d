use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The available digits cannot certify the requested quantity; the caller must refine.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("not lacunary: {0}")]
    NotLacunary(String),

    #[error("construction failed at t = {t}: {reason}")]
    ConstructionFailed { t: usize, reason: String },

    #[error("enumeration budget exceeded: {needed} points > budget {budget}")]
    BudgetExceeded { needed: String, budget: u128 },
}

impl Error {
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
