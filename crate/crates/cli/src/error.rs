use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Pipeline {
        stage: String,
        #[source]
        source: gentropy::Error,
    },
    #[error("i/o on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Pipeline { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Tags a library error with the pipeline stage that produced it.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> StageExt<T> for gentropy::Result<T> {
    fn stage(self, stage: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Pipeline { stage: stage(), source })
    }
}
