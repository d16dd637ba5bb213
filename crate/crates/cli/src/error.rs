use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("missing artifact {}: run the {stage} stage first", path.display())]
    MissingArtifact { path: PathBuf, stage: &'static str },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: subcat::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn core(context: impl Into<String>) -> impl FnOnce(subcat::Error) -> Self {
        let context = context.into();
        move |source| CliError::Core { context, source }
    }

    /// Process exit status: 2 for a missing stage input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingArtifact { .. } => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
