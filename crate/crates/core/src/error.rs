// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time grid is not strictly increasing at index {index}")]
    NonMonotoneTimes { index: usize },

    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("matrix is not antisymmetric (|v + v^T| = {asymmetry:e})")]
    NotAntisymmetric { asymmetry: f64 },

    #[error("matrix is not symmetric (|a - a^T| = {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("lifted paths are defined on different time grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("drift is not stable: smallest eigenvalue of the symmetric part is {margin:e}")]
    NotStable { margin: f64 },

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error(
        "time step too coarse for the relaxation scale: {given} steps given, at least {required} required"
    )]
    StepTooCoarse { required: usize, given: usize },

    #[error("covariance is not positive semidefinite (eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("config rejected: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
