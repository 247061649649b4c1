use thiserror::Error;

/// Errors raised by parameter validation, pricing and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    /// A parameter violates its validity domain.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The contract's averaging type does not match the requested pricer.
    #[error("{0}")]
    WrongAveraging(&'static str),

    /// The fractional-noise generator could not be set up for the requested grid.
    #[error("fractional noise generator: {0}")]
    Generator(String),
}

impl PricingError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        PricingError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, PricingError>;
