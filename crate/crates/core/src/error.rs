use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimacs line {line}: {msg}")]
    Dimacs { line: usize, msg: String },

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{n} variables exceeds the exhaustive bound of {bound}")]
    ExhaustiveBound { n: usize, bound: usize },

    #[error("qubit count {0} outside [1, {max}]", max = crate::statevector::MAX_QUBITS)]
    QubitCount(usize),

    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndex { index: usize, num_qubits: usize },

    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitIndex { qubit: usize, num_qubits: usize },

    #[error("gate is not unitary (max deviation {0:e})")]
    NonUnitary(f64),

    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("marked count {marked} invalid for a search space of {space}")]
    MarkedCount { marked: u64, space: u64 },

    #[error("invalid TSP instance: {0}")]
    InvalidTsp(String),

    #[error("{what} {count} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        count: u128,
        cap: u128,
    },
}

impl Error {
    /// True for errors caused by a resource limit rather than malformed input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::ExhaustiveBound { .. } | Error::QubitCount(_) | Error::CapExceeded { .. }
        )
    }
}
