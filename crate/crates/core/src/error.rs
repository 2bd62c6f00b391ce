use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input cannot be scaled into the unit interval (zero or non-finite norm).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("jacobi SVD did not converge after {sweeps} sweeps")]
    OracleFailure { sweeps: usize },

    /// Loss or parameters became non-finite. `last_params` is the last finite
    /// parameter vector, taken before the failing update.
    #[error("training diverged at step {step} (loss = {loss})")]
    TrainingDiverged {
        step: usize,
        loss: f64,
        last_params: Vec<f64>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
