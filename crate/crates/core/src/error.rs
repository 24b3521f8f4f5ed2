use thiserror::Error;

/// Errors raised by the automaton library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must have at least one row")]
    EmptyMatrix,

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("matrix is not self-adjoint: entry ({row}, {col}) is not the conjugate of ({col}, {row})")]
    NotSelfAdjoint { row: usize, col: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not antisymmetric at ({row}, {col})")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("trajectory has {len} slices, at least {min} required")]
    TrajectoryTooShort { len: usize, min: usize },

    #[error("clock index {index} outside admissible range {lo}..={hi}")]
    ClockOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("discreteness scale must be positive and finite, got {0}")]
    InvalidScale(f64),

    #[error("reconstruction window must be at least 1")]
    InvalidWindow,

    #[error("matrix exponential did not converge after {terms} terms (last term norm {residual:e})")]
    OracleNotConverged { terms: usize, residual: f64 },

    #[error("oracle input is not finite")]
    NonFiniteInput,

    #[error("clock box axis {axis} has length {len}; at least {min} required")]
    ClockBoxTooSmall { axis: usize, len: usize, min: usize },

    #[error("expected {expected} parts, found {found}")]
    PartCountMismatch { expected: usize, found: usize },

    #[error("trajectory does not solve the equations of motion at clock {site}")]
    NotASolution { site: usize },

    #[error("sequence has {len} entries, at least {min} required")]
    SequenceTooShort { len: usize, min: usize },

    #[error("invalid literal: {0}")]
    InvalidLiteral(String),

    #[error("need at least two usable scales for a fit, got {0}")]
    InsufficientScales(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
