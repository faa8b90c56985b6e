use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// The run itself failed (divergence, I/O); exit code 1.
    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl From<lohe_core::Error> for CliError {
    fn from(e: lohe_core::Error) -> Self {
        match e {
            lohe_core::Error::Divergence { .. } | lohe_core::Error::Integrator(_) => CliError::Run(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Run(format!("{}: {e}", path.display()))
}

pub type CliResult<T> = std::result::Result<T, CliError>;
