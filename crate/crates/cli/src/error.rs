use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("unknown preset {0:?} (see --list)")]
    UnknownPreset(String),

    #[error(transparent)]
    Model(#[from] noisy_etc::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and validation failures, 3 for jump storms, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(noisy_etc::Error::JumpStorm { .. }) => 3,
            CliError::Io { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
