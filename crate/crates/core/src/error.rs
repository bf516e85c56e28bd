use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice dimension {0}: must be odd and at least 3")]
    InvalidDimension(usize),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: expected d = {expected}, got d = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("homology class requested for a configuration with {0} syndrome defects")]
    OpenConfiguration(usize),

    #[error("terminal state has no perspectives")]
    TerminalState,

    #[error("odd number of defects ({0}) cannot be perfectly matched")]
    OddDefectCount(usize),

    #[error("shape mismatch: expected {expected} values, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite loss at update {update}; offending batch written to {dump}")]
    NonFiniteLoss { update: u64, dump: String },

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
