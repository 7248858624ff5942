use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    /// `K - A` failed the positive-definite factorization, i.e. the closed
    /// loop at this profile is not stable.
    #[error("K - A is not positive definite (smallest eigenvalue {min_eigenvalue:e}, pivot threshold {threshold:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("invalid game: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("action profile outside the action box at player {player}: {value} not in [{lower}, {upper}]")]
    OutOfBox {
        player: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
