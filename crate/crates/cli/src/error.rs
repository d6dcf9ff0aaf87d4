use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qclassical_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 bad arguments, 3 non-convergence, 4 I/O.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Core(CoreError::NonConvergent { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        })
    }
}
