use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between reading inputs and writing reports.
///
/// The variants are grouped by the stage that raises them so the CLI can map
/// each one onto a stable exit code (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("lexicon {location}: {message}")]
    Lexicon { location: String, message: String },

    #[error("unknown lexicon language `{0}` (builtin: en, sv)")]
    UnknownLanguage(String),

    #[error("{path}:{line}: {message}")]
    Dataset {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: field `{field}` not found")]
    MissingField { path: PathBuf, field: String },

    #[error("{0}")]
    EmptyData(String),

    #[error("{0}")]
    Input(String),

    #[error("predictions line {line}: {message}")]
    Predictions { line: usize, message: String },

    #[error("labeler: {0}")]
    Labeler(String),

    #[error("training: {0}")]
    Training(String),

    #[error("{0}")]
    Metric(String),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("frequency table does not match lexicon: {0}")]
    Mismatch(String),

    #[error("config: {0}")]
    Config(String),

    #[error("report: {0}")]
    Report(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn lexicon(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Lexicon {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 config, 2 data, 3 labeler.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownLanguage(_)
            | Error::UnknownAxis(_)
            | Error::Lexicon { .. } => 1,
            Error::Io { .. }
            | Error::Dataset { .. }
            | Error::MissingField { .. }
            | Error::EmptyData(_)
            | Error::Input(_)
            | Error::Training(_)
            | Error::Metric(_)
            | Error::Mismatch(_)
            | Error::Report(_) => 2,
            Error::Predictions { .. } | Error::Labeler(_) => 3,
        }
    }
}
