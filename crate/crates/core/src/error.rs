use thiserror::Error;

/// Errors raised by the simulator and the hybrid pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("{requested} qubits exceeds the register cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("register needs at least one qubit")]
    EmptyRegister,

    #[error("qubit {qubit} is not valid for a {num_qubits}-qubit register")]
    InvalidQubit { qubit: usize, num_qubits: usize },

    #[error("gate acts on the control qubit {control}")]
    GateTouchesControl { control: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("measurement effect is not a unit vector (norm {norm})")]
    NonUnitEffect { norm: f64 },

    #[error("amplitudes are not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("shot count must be at least 1")]
    NoShots,

    #[error("block has zero norm")]
    ZeroBlock,

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("n_q = {n_q} exceeds n = {n}")]
    NqExceedsN { n_q: usize, n: usize },

    #[error("n_q must be at least 1")]
    NqTooSmall,

    #[error("readout record is missing entry for projector {projector} ({role})")]
    IncompleteRecord {
        projector: usize,
        role: &'static str,
    },

    #[error("solution guess {guess} out of range 1..={size}")]
    GuessOutOfRange { guess: usize, size: usize },

    #[error("scaling fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("scaling fit needs positive counters, got {0}")]
    NonPositiveCounter(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
