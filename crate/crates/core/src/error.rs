use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Sensor altitude does not clear the object height.
    #[error("invalid scenario: altitude {altitude_m} m does not exceed size {size_m} m of object {object:?}")]
    Scenario {
        object: String,
        altitude_m: u32,
        size_m: u32,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Data errors (bad input files, invalid scenarios) as opposed to I/O failures.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

/// A parsed value plus any non-fatal warnings raised while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> Parsed<T> {
    pub(crate) fn new(value: T, warnings: Vec<String>) -> Self {
        for w in &warnings {
            log::warn!("{w}");
        }
        Parsed { value, warnings }
    }
}
