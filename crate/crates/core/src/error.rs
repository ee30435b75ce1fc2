use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register size {0} outside supported range 1..={max}", max = crate::engine::MAX_QUBITS)]
    Size(usize),

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),

    #[error("classical bit {index} out of range for {n_clbits} bits")]
    ClbitOutOfRange { index: usize, n_clbits: usize },

    #[error("classical bit {0} read before it was written")]
    UnwrittenClbit(usize),

    #[error("classical bit {0} overwritten before being read")]
    ClbitOverwritten(usize),

    #[error("gate {name} expects {expected} target(s), got {got}")]
    Arity {
        name: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("Kraus operators are not trace preserving (max deviation {0:e})")]
    IncompleteKraus(f64),

    #[error("Kraus operator shape does not match {0} target qubit(s)")]
    KrausShape(usize),

    #[error("expected a {expected}-qubit state, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid Pauli label {0:?}")]
    PauliLabel(String),

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("malformed counts: {0}")]
    Counts(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("posterior is degenerate: data are incompatible with every grid cell")]
    DegeneratePosterior,
}
