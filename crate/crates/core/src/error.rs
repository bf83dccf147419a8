use thiserror::Error;

/// Which density-operator invariant a matrix failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotSquare { rows: usize, cols: usize },
    Empty,
    NonFinite,
    NotHermitian { max_deviation: f64, tolerance: f64 },
    NotPositive { min_eigenvalue: f64, tolerance: f64 },
    TraceMismatch { trace: f64, tolerance: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Violation::Empty => write!(f, "matrix is empty"),
            Violation::NonFinite => write!(f, "matrix has non-finite entries"),
            Violation::NotHermitian {
                max_deviation,
                tolerance,
            } => write!(
                f,
                "not Hermitian: max |A - A^H| = {max_deviation:e} exceeds {tolerance:e}"
            ),
            Violation::NotPositive {
                min_eigenvalue,
                tolerance,
            } => write!(
                f,
                "not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below -{tolerance:e}"
            ),
            Violation::TraceMismatch { trace, tolerance } => write!(
                f,
                "trace {trace} differs from 1 by more than {tolerance:e}"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density operator: {0}")]
    InvalidDensity(Violation),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    EigenNonConvergence { dim: usize },

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("invalid charge spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sector state invariant violated: {0}")]
    InvalidSectorState(String),

    #[error("zero diagonal entry at sector index {0}")]
    ZeroDiagonal(usize),

    #[error("support of the closest separable state does not contain the state (index {0})")]
    SupportFailure(usize),

    #[error("sector M={charge} is not Schmidt-correlated: local index {index} repeats")]
    NotSchmidtCorrelated { charge: i64, index: usize },

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
