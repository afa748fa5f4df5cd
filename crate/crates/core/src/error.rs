use thiserror::Error;

/// Errors raised by the library. Each variant names the failing condition;
/// numeric operations never silently return a wrong integer count.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent is not a polynomial in z: {0}")]
    NonPolynomialExponent(String),
    #[error("value not representable in the coefficient field: {0}")]
    NotRepresentable(String),
    #[error("expression is not transcendental (all exponents constant)")]
    NotTranscendental,
    #[error("frequencies are not collinear")]
    NotCollinear,
    #[error("multipliers are not constant")]
    NonConstantMultipliers,
    #[error("zero of f on or too close to the contour near {0}")]
    ZeroOnContour(String),
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("polynomial root finding did not converge")]
    RootFindingFailure,
    #[error("quotient is constant")]
    DegenerateQuotient,
    #[error("frequency not representable in the given basis")]
    BasisMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
