use thiserror::Error;

/// Largest magnitude any intermediate value may reach before evaluation
/// reports [`Error::Overflow`].
pub const OVERFLOW_GUARD: f64 = 1e150;

/// Highest derivative order supported by the jet machinery.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `offset` is the 1-based byte position of the offending character.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: magnitude {magnitude:e} exceeds guard")]
    Overflow { magnitude: f64 },

    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("derivative order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooHigh(usize),

    #[error("outer jet is based at {outer} but inner jet has value {inner}")]
    BasePointMismatch { outer: f64, inner: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Pass `v` through if it is finite and within [`OVERFLOW_GUARD`].
#[inline]
pub(crate) fn guard(v: f64) -> Result<f64> {
    if v.is_nan() {
        return Err(Error::Domain("evaluation produced NaN".into()));
    }
    if !v.is_finite() || v.abs() > OVERFLOW_GUARD {
        return Err(Error::Overflow { magnitude: v.abs() });
    }
    Ok(v)
}
