use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    Geometry(String),

    /// Configuration problem. `line` is 1-based and absent for errors that are
    /// not tied to a single line (e.g. a missing key).
    #[error("{}", format_config(.key, .line, .message))]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{message} (interval [{lo}, {hi}], estimate {estimate}, error estimate {error})")]
    Numeric {
        message: String,
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
    },

    #[error("{0}")]
    UndefinedMetric(String),

    #[error("{0}")]
    Fit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_config(key: &str, line: &Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("line {line}: key `{key}`: {message}"),
        None => format!("key `{key}`: {message}"),
    }
}

impl Error {
    /// Short machine-parsable category used by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Geometry(_) => "geometry",
            Error::Config { .. } => "config",
            Error::Numeric { .. } => "numeric",
            Error::UndefinedMetric(_) => "metric",
            Error::Fit(_) => "fit",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn config(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
