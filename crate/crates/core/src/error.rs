use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two (>= 2)")]
    NotPowerOfTwo(usize),

    #[error("state is not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max deviation {max_dev:e}")]
    NotHermitian { max_dev: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("matrix is not unitary: max deviation {max_dev:e}")]
    NotUnitary { max_dev: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, value: u64, cap: u64 },

    #[error("bound not applicable: {0}")]
    BoundNotApplicable(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("formula has no satisfying witness")]
    NoWitness,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
