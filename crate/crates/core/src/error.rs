use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |A - A^dag| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not permutationally invariant (max deviation {defect:e})")]
    NotPermutationInvariant { defect: f64 },

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("witness expectation {value} is not negative on the reference state")]
    WitnessNotNegative { value: f64 },

    #[error("witness `{0}` has no alpha; a fidelity bound needs W - alpha W^(P) >= 0")]
    MissingAlpha(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("counts data has no records for setting {0}")]
    MissingSetting(String),

    #[error("counts data contains setting {0}, which the schedule does not use")]
    UnexpectedSetting(String),

    #[error("setting {0} has zero total counts")]
    ZeroCounts(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotPositiveDefinite
                | Error::Infeasible(_)
                | Error::NotHermitian { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
