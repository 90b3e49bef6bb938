use thiserror::Error;

/// Errors shared across the simulator modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix failed a structural validation (Hermiticity, unitarity,
    /// positivity, trace normalization, Kraus completeness).
    #[error("matrix validation failed: {0}")]
    InvalidMatrix(String),

    /// A quantity that must be real (or otherwise exact) picked up a
    /// residue beyond the allowed tolerance.
    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),

    /// Text could not be parsed as a Pauli string.
    #[error("parse error at position {position}: {message}")]
    PauliParse { position: usize, message: String },

    /// A structured text input (square block, parameter file, grid spec)
    /// could not be parsed.
    #[error("parse error on line {line}: {message}")]
    TextParse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
