use std::fmt;

/// Input errors exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::Input(anyhow::anyhow!("{msg}"))
    }

    pub fn internal(msg: impl fmt::Display) -> Self {
        CliError::Internal(anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "input error: {e:#}"),
            CliError::Internal(e) => write!(f, "internal error: {e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Tag a fallible result as an input or internal failure.
pub trait Classify<T> {
    fn input_err(self, what: impl fmt::Display) -> CliResult<T>;
    fn internal_err(self, what: impl fmt::Display) -> CliResult<T>;
}

impl<T, E: fmt::Display> Classify<T> for Result<T, E> {
    fn input_err(self, what: impl fmt::Display) -> CliResult<T> {
        self.map_err(|e| CliError::Input(anyhow::anyhow!("{what}: {e}")))
    }

    fn internal_err(self, what: impl fmt::Display) -> CliResult<T> {
        self.map_err(|e| CliError::Internal(anyhow::anyhow!("{what}: {e}")))
    }
}
