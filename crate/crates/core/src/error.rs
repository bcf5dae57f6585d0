use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state of {0} qubits exceeds the 4-qubit cap")]
    SizeOverflow(usize),

    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("qubit index {index} out of range for {qubits}-qubit state")]
    QubitIndex { index: usize, qubits: usize },

    #[error("invalid operator label `{0}`")]
    InvalidLabel(String),

    #[error("operator {0} is not part of the catalog")]
    UnknownOperator(String),

    #[error("catalog {0} requires an angle")]
    MissingAngle(&'static str),

    #[error("angle {0} outside (0, pi/2)")]
    AngleOutOfRange(f64),

    #[error("operator {op} does not map basis {source_basis} onto basis {target}")]
    InvalidCell {
        op: String,
        source_basis: String,
        target: String,
    },

    #[error("basis {0} is not used by this protocol")]
    UnknownBasis(String),

    #[error("unambiguous discrimination infeasible: states are linearly dependent (rank {rank} < {count})")]
    UsdInfeasible { rank: usize, count: usize },

    #[error("min-error solver did not converge after {iterations} iterations (gap {gap:.3e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("invalid discrimination problem: {0}")]
    InvalidProblem(String),

    #[error("states are not orthogonal (overlap {0:.3e})")]
    NotOrthogonal(f64),

    #[error("empty pulse")]
    EmptyPulse,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient statistics: {0}")]
    InsufficientCounts(String),

    #[error("no raw key bits were produced")]
    NoRawBits,

    #[error("value {0} outside the admissible range")]
    OutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
