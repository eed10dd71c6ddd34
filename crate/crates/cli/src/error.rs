use thiserror::Error;

use micromaser::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: configuration, flags, or a parameter rejected by the
    /// library before any numerics ran.
    #[error("{0}")]
    Validation(String),
    /// A solver failed or too many sweep points failed.
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Io(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::InvalidParameter { .. }
            | CoreError::InvalidGrid { .. }
            | CoreError::LevelOutOfRange { .. }
            | CoreError::Cache(_) => Self::Validation(e.to_string()),
            CoreError::StabilityBound { suggested, .. } => Self::Validation(format!(
                "{e}; set evolve.dt to a value below {suggested:.6e} or remove it to use the default"
            )),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
