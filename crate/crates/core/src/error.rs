use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("conflicting duplicate entry {tuple:?}: {first} vs {second}")]
    ConflictingDuplicate {
        tuple: Vec<usize>,
        first: f64,
        second: f64,
    },

    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),

    #[error("sector dimension {dim} exceeds cap {cap}")]
    SectorTooLarge { dim: usize, cap: usize },

    #[error("no determinants with {n_electrons} electrons and 2Sz = {ms2}")]
    EmptySector { n_electrons: usize, ms2: i32 },

    #[error("degenerate reference: denominator {value:e} for excitation {excitation}")]
    DegenerateDenominator { excitation: String, value: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("intermediate term count {count} exceeds cap {cap}")]
    TermCapExceeded { count: usize, cap: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("coefficient {re} + {im}i of term '{term}' is not real")]
    NonRealCoefficient { term: String, re: f64, im: f64 },

    #[error("{n} qubits exceeds the simulator cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
