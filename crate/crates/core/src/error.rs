use thiserror::Error;

/// Errors produced by the walk, spectrum and rational-approximation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("coin vector is not normalized: |c|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("coin vector has {got} components, expected {expected}")]
    CoinDimension { expected: usize, got: usize },

    #[error("coin orderings are only defined for 4-component coins")]
    OrderingOnQubit,

    #[error("coin ordering {got:?} does not match the stepper's expected {expected:?}")]
    OrderingMismatch {
        expected: crate::coin::Ordering,
        got: crate::coin::Ordering,
    },

    #[error("walk support reached the window boundary before step {step}")]
    BoundaryContact { step: u64 },

    #[error("invalid field phase: {0}")]
    InvalidPhase(String),

    #[error("invalid walk parameters: {0}")]
    InvalidSpec(String),

    #[error("continued fraction depth {depth} out of range 1..={len}")]
    DepthOutOfRange { depth: usize, len: usize },

    #[error("series of length {len} is too short for max period {max_period} (need >= {needed})")]
    SeriesTooShort {
        len: usize,
        max_period: usize,
        needed: usize,
    },

    #[error("distribution mixes both checkerboard sublattices")]
    Checkerboard,

    #[error("invalid lemma input: {0}")]
    InvalidLemma(String),

    #[error("dispersion root finding failed at (kx, ky) = ({kx}, {ky}): found {found} roots")]
    RootCount { kx: f64, ky: f64, found: usize },

    #[error("eigen-decomposition did not converge")]
    Eigen,
}

pub type Result<T> = std::result::Result<T, WalkError>;
