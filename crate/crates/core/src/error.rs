use alloc::string::String;
use core::fmt;

/// Crate-wide error taxonomy.
///
/// Validation errors come from parsing and invariant checks; the two
/// numerical variants (`SingularFundamental`, `NonFiniteValue`) signal that
/// integration left the trustworthy regime, typically from a stiff
/// coefficient on a too-coarse grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Problem document is not syntactically valid.
    Syntax(String),
    /// Shapes of matrices or vectors disagree across fields.
    DimensionMismatch(String),
    /// A boundary derivative order violates `0 <= order < s - 1/p`.
    InvalidOrder { order: f64, bound: f64 },
    /// Space parameters outside `s > 1` non-integer, `1 <= p < inf`.
    InvalidSpace(String),
    /// Interval with `a >= b`.
    EmptyInterval { a: f64, b: f64 },
    /// Sampled grid not strictly increasing or not covering the interval.
    InvalidGrid(String),
    /// Evaluation point outside `[a, b]`.
    OutOfDomain { t: f64, a: f64, b: f64 },
    /// Derivative order not representable for the given coefficient kind.
    UnsupportedOrder { order: usize, reason: String },
    /// Caputo derivative requested with an integer order; use the plain
    /// derivative instead.
    IntegerOrder { order: f64 },
    /// A fundamental-matrix inverse failed; the integration left the
    /// invertible regime.
    SingularFundamental(String),
    /// Overflow or NaN during integration.
    NonFiniteValue(String),
    /// Consistency tolerance at or below the rank-tolerance floor.
    ToleranceConflict { consistency: f64, floor: f64 },
    /// Solution evaluation requested on an inconsistent problem.
    NoSolution,
    /// Not enough derivative samples for the requested Sobolev order.
    MissingDerivatives { needed: usize, available: usize },
    /// No closed-form oracle covers the given problem class.
    NoApplicableOracle(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax(msg) => write!(f, "syntax error: {msg}"),
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::InvalidOrder { order, bound } => write!(
                f,
                "invalid derivative order {order}: must satisfy 0 <= order < s - 1/p = {bound}"
            ),
            Error::InvalidSpace(msg) => write!(f, "invalid space parameters: {msg}"),
            Error::EmptyInterval { a, b } => {
                write!(f, "empty interval: a = {a} must be less than b = {b}")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::OutOfDomain { t, a, b } => {
                write!(f, "point t = {t} outside the interval [{a}, {b}]")
            }
            Error::UnsupportedOrder { order, reason } => {
                write!(f, "unsupported derivative order {order}: {reason}")
            }
            Error::IntegerOrder { order } => write!(
                f,
                "Caputo derivative of integer order {order}; use the classical derivative"
            ),
            Error::SingularFundamental(msg) => {
                write!(f, "singular fundamental matrix: {msg}")
            }
            Error::NonFiniteValue(msg) => write!(f, "non-finite value: {msg}"),
            Error::ToleranceConflict { consistency, floor } => write!(
                f,
                "consistency tolerance {consistency} is at or below the rank floor {floor}"
            ),
            Error::NoSolution => write!(f, "the problem is inconsistent; no solution to evaluate"),
            Error::MissingDerivatives { needed, available } => write!(
                f,
                "norm needs derivatives up to order {needed}, only {available} available"
            ),
            Error::NoApplicableOracle(msg) => write!(f, "no applicable oracle: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
