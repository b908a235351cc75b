use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("generator is not exponentially stable (spectral abscissa {abscissa:e})")]
    NotStable { abscissa: f64 },

    #[error("principal square root undefined: eigenvalue {0} of -A on the closed negative real axis")]
    Branch(String),

    #[error("numerically singular system: {0}")]
    Singular(String),

    #[error("ill-conditioned problem: {0}")]
    Conditioning(String),

    #[error("matrix is not (numerically) diagonalizable: eigenvector condition {condition:e}")]
    NonDiagonalizable { condition: f64 },

    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("not a bounded analytic function on the left half-plane: {reason} (in `{subterm}`)")]
    HinfViolation { subterm: String, reason: String },

    #[error("evaluation at {point} is within {distance:e} of the pole {pole}")]
    PoleProximity {
        point: String,
        pole: String,
        distance: f64,
    },

    #[error("construction failed: extraction residual {residual:e} exceeds {limit:e} (grid too coarse?)")]
    ConstructionFailed { residual: f64, limit: f64 },

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
