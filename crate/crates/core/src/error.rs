//! Error type shared across the crate.

use crate::spectral::Grid;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("array has length {got}, grid requires {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids: {left:?} vs {right:?}")]
    GridMismatch { left: Grid, right: Grid },

    #[error("operation requires the {expected:?} representation")]
    WrongRepresentation { expected: crate::spectral::Representation },

    #[error("Sobolev order s = {s} outside the supported range [-2, 3]")]
    UnsupportedOrder { s: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite state at step {step} (pair energy norm = {norm})")]
    NonFinite { step: usize, norm: f64 },

    #[error(
        "reference solution not converged: self-difference {tolerance:.3e} \
         exceeds 1% of the smallest measured error {min_error:.3e}"
    )]
    ReferenceNotConverged { tolerance: f64, min_error: f64 },

    #[error("unknown scheme '{0}'; expected one of {1}")]
    UnknownScheme(String, &'static str),

    #[error("unknown nonlinear model '{0}'; expected sine, zero or constant:<c>")]
    UnknownModel(String),
}
