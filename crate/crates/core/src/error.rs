use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("eigensolver did not converge after {iterations} restarts (worst residual {worst_residual:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
