//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,

    #[error("degree {got} exceeds the bound {bound}")]
    DegreeExceeded { bound: u32, got: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear change of variables is not invertible")]
    NotInvertible,

    #[error("variable index {index} out of bounds for {nvars} variables")]
    IndexOutOfBounds { index: usize, nvars: usize },

    #[error("moment slot {0} is unassigned but a fully numeric block was demanded")]
    UnassignedSlot(String),

    #[error("Hankel block is singular under the given assignment")]
    SingularBlock,

    #[error("eigenvector coordinate on the basis element 1 vanishes; coordinates are non-generic")]
    DegenerateNormalization,

    #[error("sum of point multiplicities {got} does not match the operator size {expected}")]
    MultiplicityMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
