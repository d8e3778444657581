use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every configuration was assigned zero probability, so the observed
    /// data cannot have been produced by the model.
    #[error("observations are impossible under the model (all configurations at zero probability) after submission {submission}")]
    Inconsistent { submission: usize },

    /// A configuration file failed validation. `line` points at the offending key when it can be located.
    #[error("{}", display_config_error(.path, *.line, .field, .message))]
    Config {
        path: Option<PathBuf>,
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Config { .. })
    }
}

fn display_config_error(
    path: &Option<PathBuf>,
    line: Option<usize>,
    field: &str,
    message: &str,
) -> String {
    let location = match (path, line) {
        (Some(p), Some(l)) => format!("{}:{}: ", p.display(), l),
        (Some(p), None) => format!("{}: ", p.display()),
        (None, Some(l)) => format!("line {l}: "),
        (None, None) => String::new(),
    };
    format!("{location}field `{field}`: {message}")
}
