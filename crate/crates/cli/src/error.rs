use std::path::Path;

use interbank::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("solver failure budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::Parse(_) => CliError::Io(e.to_string()),
            Error::Support { .. } | Error::Infeasible(_) | Error::InfiniteDivergence { .. } => {
                CliError::Budget(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Wraps an error from reading or writing `path`.
pub fn at(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => other,
    }
}
