//! Error type shared across the crate.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::expr::ParseError;
use crate::prf::ValidationReport;

/// Errors produced by PRF construction, evaluation, and analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A phase value fell outside `[0, 1]` by more than the rounding
    /// tolerance.
    PhaseOutOfRange { value: f64 },
    /// A pulse strength was negative or not a number.
    InvalidStrength { value: f64 },
    /// A parameter violated a documented precondition.
    InvalidParameter(&'static str),
    /// A PRF evaluation returned a non-finite value.
    EvaluationSingularity { phi: f64, eps: f64 },
    /// The neuron state angle sits at the firing threshold, where the
    /// membrane voltage diverges.
    InfiniteVoltage { theta: f64 },
    /// A neuron state angle fell outside `(-pi, pi)`.
    AngleOutOfRange { theta: f64 },
    /// The phase-to-angle chart is singular at the cycle endpoints.
    EndpointSingularity { phi: f64 },
    /// A strobe-map intermediate left `[0, 1]` beyond rounding tolerance,
    /// which indicates the response function is not a valid PRF at this
    /// pulse strength.
    InternalConsistency {
        phi: f64,
        eps: f64,
        intermediate: f64,
    },
    /// Expression parsing failed.
    Parse(ParseError),
    /// Expression evaluation hit a non-finite intermediate; the payload
    /// renders the offending subexpression.
    ExprSingularity { subexpr: String },
    /// A parsed response function failed axiom validation and was rejected.
    ValidationFailed(Box<ValidationReport>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PhaseOutOfRange { value } => {
                write!(f, "phase {value} outside [0, 1] beyond rounding tolerance")
            }
            Error::InvalidStrength { value } => {
                write!(
                    f,
                    "pulse strength {value} is not a finite non-negative number"
                )
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::EvaluationSingularity { phi, eps } => {
                write!(f, "PRF evaluation singular at phi={phi}, eps={eps}")
            }
            Error::InfiniteVoltage { theta } => {
                write!(f, "voltage diverges at theta={theta} (firing threshold)")
            }
            Error::AngleOutOfRange { theta } => {
                write!(f, "state angle {theta} outside (-pi, pi)")
            }
            Error::EndpointSingularity { phi } => {
                write!(f, "phase-to-angle chart singular at phi={phi}")
            }
            Error::InternalConsistency {
                phi,
                eps,
                intermediate,
            } => {
                write!(
                    f,
                    "strobe intermediate {intermediate} left [0, 1] at phi={phi}, eps={eps}; \
                     the response function violates the PRF range axiom at this strength"
                )
            }
            Error::Parse(e) => write!(f, "{e}"),
            Error::ExprSingularity { subexpr } => {
                write!(f, "expression evaluation singular in `{subexpr}`")
            }
            Error::ValidationFailed(report) => {
                write!(
                    f,
                    "response function failed PRF validation: {}",
                    report.summary()
                )
            }
        }
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
