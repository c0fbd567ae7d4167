use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SrvfError>;

#[derive(Debug, Error)]
pub enum SrvfError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid reparametrisation: {0}")]
    InvalidReparametrisation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SrvfError {
    /// True for errors caused by malformed or inconsistent input data, as opposed
    /// to invalid numerical parameters.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            SrvfError::Parse { .. }
                | SrvfError::Io { .. }
                | SrvfError::DimensionMismatch(..)
                | SrvfError::InvalidCurve(_)
                | SrvfError::InvalidPartition(_)
                | SrvfError::InvalidReparametrisation(_)
        )
    }
}
