use std::path::PathBuf;

use ednce_core::ErrorKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: line {line}: {source}", path.display())]
    JsonLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// Structurally valid JSON with inconsistent content.
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] ednce_core::Error),
    #[error("sampling stopped after {produced} of {requested} graphs: {source}")]
    Sampling {
        produced: usize,
        requested: usize,
        #[source]
        source: ednce_core::Error,
    },
    #[error("{failures} invariant check(s) failed")]
    Check { failures: usize },
}

impl Error {
    /// 2 for bad input, 3 for exhausted budgets or infeasible instances, 4
    /// for internal invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) | Error::Sampling { source: e, .. } => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Budget => 3,
                ErrorKind::Internal => 4,
            },
            Error::Check { .. } => 4,
            _ => 2,
        }
    }
}
