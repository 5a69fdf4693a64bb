use thiserror::Error;

/// Process exit codes.
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<dscim::Error> for CliError {
    fn from(e: dscim::Error) -> Self {
        use dscim::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidSpec(_) | E::Range { .. } | E::Config(_) | E::EmptySearchSpace => {
                CliError::Config(msg)
            }
            E::Invariant(_) => CliError::Internal(msg),
            E::Shape(_)
            | E::EmptyTrace(_)
            | E::EmptyStats
            | E::Trace { .. }
            | E::Io(_)
            | E::Csv(_)
            | E::Json(_) => CliError::Input(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
