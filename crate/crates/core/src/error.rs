use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("relay scheme evaluated with no relays")]
    NoRelay,

    /// Too few trials (or too few observed events) to produce the requested
    /// statistic. The caller should raise the trial count.
    #[error("insufficient statistical resolution: {0}")]
    InsufficientResolution(String),

    #[error("{0}")]
    Config(#[from] ConfigError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed record at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

/// A scenario configuration problem, located in the source document when possible.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("config error{}: {message}", location(*.line, *.column, .field.as_deref()))]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

fn location(line: Option<usize>, column: Option<usize>, field: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(l) = line {
        out.push_str(&format!(" at line {l}"));
        if let Some(c) = column {
            out.push_str(&format!(", column {c}"));
        }
    }
    if let Some(f) = field {
        out.push_str(&format!(" (field `{f}`)"));
    }
    out
}
