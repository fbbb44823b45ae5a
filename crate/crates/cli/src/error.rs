use thiserror::Error;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    VerifyFailed = 1,
    Validation = 2,
    Numerical = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] polymass::Error),

    #[error("output: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::Validation,
            CliError::Core(e) if e.is_validation() => ExitCode::Validation,
            CliError::Core(_) => ExitCode::Numerical,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => ExitCode::Validation,
        }
    }
}
