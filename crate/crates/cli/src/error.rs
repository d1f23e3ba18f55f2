use std::process::ExitCode;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parameter(String),
    #[error("{0}")]
    Insufficient(String),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Corruption(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A verifier ran to completion and reported failures.
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::SelfTest(_) => 1,
            CliError::Parameter(_) => 2,
            CliError::Insufficient(_) => 3,
            CliError::Format(_) | CliError::Corruption(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}

impl From<staircase::Error> for CliError {
    fn from(e: staircase::Error) -> Self {
        use staircase::Error as E;
        match e {
            E::Parameter(_) | E::ThresholdLowering { .. } | E::Unsupported(_) | E::BudgetExceeded { .. } => {
                CliError::Parameter(e.to_string())
            }
            E::InsufficientParties { .. } => CliError::Insufficient(e.to_string()),
            E::Undecodable(_) | E::Corruption(_) | E::Singular { .. } | E::DivisionByZero => {
                CliError::Corruption(e.to_string())
            }
            E::Io(io) => CliError::Io(io),
        }
    }
}
