use std::path::PathBuf;

use qsl_core::QslError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A computed quantity broke an invariant that must hold for every output row.
    #[error("numerical contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Numerical(#[from] QslError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Contract(_) | CliError::Numerical(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Parameter errors raised while building model inputs are configuration problems.
pub(crate) fn config(e: QslError) -> CliError {
    CliError::Config(e.to_string())
}
