//! Error type shared by every fallible operation in the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoreError {
    /// Inverting or taking dlog of a series that is zero on its whole window
    /// and carries no exact source to re-expand from.
    #[error("cannot invert a series that is zero on its window")]
    ZeroInversion,

    /// A coefficient beyond the known window was requested and the series is
    /// not backed by an exact source.
    #[error("precision exhausted: exponent {needed} requested, window ends before {available}")]
    PrecisionExhausted { needed: i64, available: i64 },

    /// `exp` is only defined for arguments of valuation >= 1.
    #[error("series exponential needs valuation >= 1, argument has valuation {0}")]
    ExpValuation(i64),

    /// `log` of a local unit needs valuation 0 and constant term 1 after
    /// normalisation.
    #[error("series logarithm needs a unit with constant term 1")]
    LogArgument,

    /// A nonzero function, series, or scalar was required.
    #[error("zero input where a nonzero value is required: {0}")]
    ZeroInput(String),

    /// Operation requires pairwise distinct points.
    #[error("points must be pairwise distinct: {0}")]
    CoincidentPoints(String),

    /// Evaluation at a zero or pole of the function.
    #[error("function has a zero or pole at {0}; value undefined")]
    ValueUndefined(String),

    /// Charge divisors and idele divisors must have degree zero here.
    #[error("expected a degree-zero divisor, got degree {0}")]
    NonZeroDegree(i64),

    /// Matching enumeration refuses monomials above the configured cap.
    #[error("monomial degree {degree} exceeds the enumeration cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    /// Polynomial input does not split into linear factors over the rationals.
    #[error("polynomial has an irreducible factor of degree > 1 over the rationals")]
    IrreducibleFactor,

    /// Integer arithmetic helper hit a size it refuses to handle.
    #[error("{0}")]
    Unsupported(String),

    /// A tabulated model file lacks a required entry or window.
    #[error("model table is missing {0}")]
    MissingEntry(String),

    /// A tabulated model file fails one of the load-time identities.
    #[error("model validation failed: {0}")]
    ModelInvariant(String),

    /// Text input (expressions, model files, adele files) failed to parse.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Catch-all for contract violations described by a message.
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
