use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("coefficient layout error: {0}")]
    Layout(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("MAP optimizer did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    MapNotConverged {
        iterations: usize,
        grad_norm: f64,
        best: Vec<f64>,
    },

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("every proposal was invalid ({invalid} of {total}); last failure: {reason}")]
    AllProposalsInvalid {
        invalid: usize,
        total: usize,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line runner:
    /// 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Config(_) | Error::Json(_) | Error::Domain(_) => 2,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
