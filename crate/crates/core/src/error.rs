use num_complex::Complex64;
use thiserror::Error;

use crate::ncalg::BasisTag;

/// Errors raised across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument {z} is within tolerance of a pole of e_q2")]
    Pole { z: Complex64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sum diverges or is unresolved at cutoff ({what}): tail spread {spread:e}")]
    Divergence { what: String, spread: f64 },
    #[error("integer order nu = {0} is not supported (logarithmic case)")]
    IntegerOrder(f64),
    #[error("basis mismatch: {left:?} vs {right:?}")]
    TagMismatch { left: BasisTag, right: BasisTag },
    #[error("operation not supported in basis {0:?}")]
    UnsupportedBasis(BasisTag),
    #[error("reordering {0} needs an infinite series; no finite normal form exists")]
    NonPolynomialReorder(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("serialization failed: {0}")]
    Serialization(String),
}

pub type QResult<T> = Result<T, QError>;
