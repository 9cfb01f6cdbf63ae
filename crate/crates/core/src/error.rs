use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Filter coefficients violate the tight-support invariants.
    InvalidFilter(&'static str),
    /// Innovation parameters outside their family's domain.
    InvalidInnovations(String),
    InvalidArgument(String),
    InvalidPlan(String),
    InsufficientLength { needed: usize, available: usize },
    GridTooCoarse { grid: usize, required: usize },
    TransferFunctionVanishes,
    InsufficientValidGrid { valid: usize },
    /// Two independent verdict pathways contradicted each other.
    InternalInconsistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFilter(msg) => write!(f, "invalid filter: {msg}"),
            Error::InvalidInnovations(msg) => write!(f, "invalid innovations: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidPlan(msg) => write!(f, "invalid estimation plan: {msg}"),
            Error::InsufficientLength { needed, available } => write!(
                f,
                "insufficient length: need {needed} samples, have {available}"
            ),
            Error::GridTooCoarse { grid, required } => write!(
                f,
                "grid too coarse: G = {grid}, resolution bound requires G >= {required}"
            ),
            Error::TransferFunctionVanishes => f.write_str("transfer function vanishes on grid"),
            Error::InsufficientValidGrid { valid } => {
                write!(f, "insufficient valid grid: {valid} valid points, need 3")
            }
            Error::InternalInconsistency(msg) => write!(f, "internal inconsistency: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
