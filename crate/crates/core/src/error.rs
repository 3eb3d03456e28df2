use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Construction was asked for a field modulus that factors over F_2.
    #[error("polynomial {0} is reducible over F_2")]
    ReduciblePolynomial(String),

    #[error("enumeration budget exceeded: {quantity} needs {required}, budget allows {allowed}")]
    BudgetExceeded {
        quantity: &'static str,
        required: u128,
        allowed: u128,
    },

    /// Strict verification was pointed at an instance no claim family covers.
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
