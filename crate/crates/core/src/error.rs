use thiserror::Error;

use crate::fock::Side;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("side mismatch: expected a vector in {expected}, got one in {got}")]
    SideMismatch { expected: Side, got: Side },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid form degree {0} (must be 0, 1 or 2)")]
    InvalidDegree(usize),

    #[error("truncation level {0} is below the minimum of 2")]
    TruncationTooSmall(usize),

    #[error("grid resolution {0} is below the minimum of 2")]
    GridTooSmall(usize),

    #[error("generator pivot vector is zero")]
    ZeroPivot,

    #[error("covector must be nonzero")]
    ZeroCovector,

    #[error("gauge is not unitary at vertex {vertex}: ‖u*u - 1‖ = {defect:e}")]
    NonUnitaryGauge { vertex: usize, defect: f64 },

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
