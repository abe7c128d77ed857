//! Library-wide error type.
//!
//! Every fallible operation returns [`Error`]; the variants map 1:1 onto the
//! CLI exit codes (invalid input / resource budget / numeric failure).

use thiserror::Error;

/// Errors reported by the gnorm library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation
    /// (e.g. an exponent below 1, a negative moment).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally valid input on which the operation is undefined
    /// (e.g. dual-norming the zero vector).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An enumeration or search exceeded its configured budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// An iterative method failed to converge within its iteration cap.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Missing or inconsistent caller-supplied configuration
    /// (e.g. a Weibull tail bound without the constant c2).
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
