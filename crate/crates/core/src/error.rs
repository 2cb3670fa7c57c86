use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not hermitian: worst entry ({row},{col}) violates by {delta:.3e}")]
    NotHermitian { row: usize, col: usize, delta: f64 },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("zero matrix passed to phase_commute")]
    ZeroMatrix,
    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("invalid basis parameter: {0}")]
    InvalidBasis(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("invalid vector: {0}")]
    InvalidVector(String),
    #[error("pair constraint violated at index {index}: deviation {delta:.3e}")]
    PairConstraint { index: usize, delta: f64 },
    #[error("non-real compression coefficient at index {index} (im = {im:.3e})")]
    NonRealCoefficient { index: usize, im: f64 },
    #[error("block pattern violated: entry ({row},{col}) = {magnitude:.3e} outside blocks")]
    BlockPattern {
        row: usize,
        col: usize,
        magnitude: f64,
    },
    #[error("basis does not satisfy the simplex condition (failing pair {0}, {1})")]
    NotSimplex(usize, usize),
    #[error("basis is not unitary (element {0})")]
    NotUnitary(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
