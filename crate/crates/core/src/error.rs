use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state is not normalized (norm {norm:.3e})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("structural zero at ({row}, {col}) has magnitude {magnitude:.3e}")]
    StructureViolation { row: usize, col: usize, magnitude: f64 },

    #[error("Bloch axis is not a unit vector (norm {norm:.6})")]
    NonUnitAxis { norm: f64 },

    #[error("sectors act on different rows: {left:?} vs {right:?}")]
    RowMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("sector {sector} has rotation angle 0 mod pi; its axis is unobservable")]
    IndeterminateLabel { sector: usize },

    #[error("request is infeasible: {0}")]
    Infeasible(String),

    #[error("pulses do not close to a single pulse: {0}")]
    NotClosed(String),

    #[error("no exact evolution loop within horizon (best residual {best_residual:.3e})")]
    NoExactLoop { best_residual: f64 },

    #[error("exchange needs |b| = 1 in some sector; best available is {ceiling:.6}")]
    InfeasibleParams { ceiling: f64 },

    #[error("two-pulse solver failed: {0}")]
    SolverFailure(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
