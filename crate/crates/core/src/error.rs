use thiserror::Error;

/// Errors raised by the library. Degenerate strata are not errors; they are
/// reported through [`crate::closed_forms::StratumValue`] diagnostics.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("{what} requires n <= {bound}, got n = {n}")]
    BoundExceeded {
        what: &'static str,
        n: usize,
        bound: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("convention check failed: {0}")]
    Convention(String),

    #[error("malformed forest at recovery step {step}: {reason}")]
    MalformedForest { step: usize, reason: String },

    #[error("{count} degenerate strata could not be resolved: {detail}")]
    DegenerateStrata { count: usize, detail: String },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_bound(what: &'static str, n: usize, bound: usize) -> Result<()> {
    if n > bound {
        Err(Error::BoundExceeded { what, n, bound })
    } else {
        Ok(())
    }
}
