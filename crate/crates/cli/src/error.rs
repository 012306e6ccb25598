use posmap_core::Error;
use thiserror::Error as ThisError;

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error in field '{field}': {message}")]
    Parse { field: String, message: String },
    #[error("cannot read '{path}': {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Core(#[from] Error),
}

impl CliError {
    pub fn parse(field: &str, message: &str) -> Self {
        CliError::Parse {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    /// Bad input of any kind maps to 64; failures inside a computation map to 70.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::NotSquare { .. }
                | Error::NotHermitian { .. }
                | Error::DimensionOverflow { .. }
                | Error::DimensionMismatch(_)
                | Error::NonFinite { .. }
                | Error::UnknownName(_)
                | Error::BadParams(_)
                | Error::NotHermitianChoi { .. }
                | Error::BadK { .. }
                | Error::ZeroMap
                | Error::NotCp { .. } => EXIT_USAGE,
                _ => EXIT_INTERNAL,
            },
        }
    }
}
