use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid presentation: {0}")]
    Presentation(String),

    #[error("invalid rewriting system: {0}")]
    Rewriting(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("horizon exceeded: {what} needs radius {needed}, table has {available}")]
    Horizon {
        what: String,
        needed: usize,
        available: usize,
    },

    #[error("invalid automaton: {0}")]
    Automaton(String),

    #[error("weight increments inconsistent at cone radius {radius}: {detail}")]
    ConeInconsistent { radius: usize, detail: String },

    #[error("certification failed at depth {depth}: {check} (witness `{witness}`)")]
    Certification {
        depth: usize,
        check: String,
        witness: String,
    },

    #[error("potential is not semisimple: maximal components {0:?} are connected")]
    NotSemisimple(Vec<usize>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Invalid(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for failures of certification, semisimplicity or consistency
    /// checks, as opposed to malformed input or usage problems.
    pub fn is_validation_failure(&self) -> bool {
        matches!(
            self,
            Error::Certification { .. }
                | Error::NotSemisimple(_)
                | Error::ConeInconsistent { .. }
                | Error::Numerical(_)
        )
    }
}
