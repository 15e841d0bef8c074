use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("positive operator is numerically zero")]
    ZeroOperator,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operators are attached to different positive contexts")]
    ContextMismatch,

    #[error("operator admits no A-adjoint (membership residual {0:.3e})")]
    NotInBA(f64),

    #[error("operator is not A-bounded (membership residual {0:.3e})")]
    NotABounded(f64),

    #[error("numerical radius routes disagree: reduction {reduced}, theta formula {formula}")]
    RouteDisagreement { reduced: f64, formula: f64 },

    #[error("Gelfand sequence value {value} at power {power} is below the spectral radius {radius}")]
    GelfandDivergence { power: u32, value: f64, radius: f64 },

    #[error("off-diagonal radius matrix is not symmetric at ({row}, {col}): {upper} vs {lower}")]
    AsymmetricRadii { row: usize, col: usize, upper: f64, lower: f64 },

    #[error("ragged blocks: {0}")]
    RaggedBlocks(String),

    #[error("block ({row}, {col}) admits no A-adjoint")]
    BlockNotInBA { row: usize, col: usize },

    #[error("block ({row}, {col}) is not A-bounded")]
    BlockNotABounded { row: usize, col: usize },

    #[error("permutation index k = {k} is invalid for d = {d}")]
    BadIndex { k: usize, d: usize },

    #[error("A-unitary construction failed after {0} attempts")]
    ConstructionFailed(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid matrix data: {0}")]
    Parse(String),

    #[error("instance {id}: {source}")]
    Instance {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn in_instance(self, id: &str) -> Self {
        Error::Instance { id: id.to_string(), source: Box::new(self) }
    }
}
