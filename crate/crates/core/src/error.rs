use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("format: {0}")]
    Format(String),
    #[error("type-preservation violation at word {0}")]
    TypeMismatch(String),
    #[error("resource: {0}")]
    Resource(String),
}

impl Error {
    /// The message without the category prefix.
    pub fn detail(&self) -> String {
        match self {
            Error::Parse { line, msg } => format!("line {line}: {msg}"),
            Error::TypeMismatch(w) => format!("type-preservation violation at word {w}"),
            Error::InvalidInput(m)
            | Error::Range(m)
            | Error::Config(m)
            | Error::Format(m)
            | Error::Resource(m) => m.clone(),
        }
    }

    /// Short machine-readable tag, used as the CLI error prefix.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Range(_) => "range",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Format(_) => "format",
            Error::TypeMismatch(_) => "type-mismatch",
            Error::Resource(_) => "resource",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
