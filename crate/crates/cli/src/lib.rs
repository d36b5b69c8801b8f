//! Shared pieces of the command-line front end: output documents and the
//! exit-code contract.

pub mod report;

use fredbvp::Error;

/// Exit codes: 0 success, 1 verification failure, 2 input or validation
/// error, 3 numerical failure.
///
/// The mapping is total over the error taxonomy: numerical failures
/// (singular fundamental matrix, non-finite values) are 3, every other
/// variant is an input/validation error, 2.
pub fn error_exit_code(err: &Error) -> u8 {
    match err {
        Error::SingularFundamental(_) | Error::NonFiniteValue(_) => 3,
        Error::Syntax(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidOrder { .. }
        | Error::InvalidSpace(_)
        | Error::EmptyInterval { .. }
        | Error::InvalidGrid(_)
        | Error::OutOfDomain { .. }
        | Error::UnsupportedOrder { .. }
        | Error::IntegerOrder { .. }
        | Error::ToleranceConflict { .. }
        | Error::NoSolution
        | Error::MissingDerivatives { .. }
        | Error::NoApplicableOracle(_) => 2,
    }
}
