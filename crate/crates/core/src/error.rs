use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coefficient vector had no entries.
    EmptyCoefficients,
    /// A vector or matrix had the wrong length or shape.
    DimensionMismatch { expected: usize, found: usize },
    /// An argument was outside its admissible range.
    InvalidArgument(String),
    /// A function sample or intermediate result was NaN or infinite.
    NonFinite(String),
    /// The index set is missing a componentwise-smaller multi-index.
    NotDownwardClosed,
    /// The RePU of power zero has no usable derivative.
    NonDifferentiable,
    /// A condition number was requested for a non-square matrix.
    NotSquare { rows: usize, cols: usize },
    /// A function name is not registered.
    UnknownFunction(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyCoefficients => f.write_str("coefficient vector is empty"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::NotDownwardClosed => f.write_str("index set is not downward closed"),
            Error::NonDifferentiable => f.write_str("sigma_0 is not differentiable"),
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::UnknownFunction(name) => write!(f, "unknown function `{name}`"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
