use thiserror::Error;

/// Failures of a study run, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
            CliError::Unreachable(_) => 5,
        }
    }
}

impl From<mmw::Error> for CliError {
    fn from(e: mmw::Error) -> Self {
        use mmw::Error as E;
        match e {
            E::InvalidParameter(m) | E::Geometry(m) => CliError::Config(m),
            E::Domain(m) | E::Convergence(m) => CliError::Numeric(m),
            E::NoSolution(m) => CliError::Unreachable(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
