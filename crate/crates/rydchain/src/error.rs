use std::io;
use std::path::PathBuf;

use rydchain_core::Error as CoreError;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_CAPACITY: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Disagreement(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Stream(#[from] io::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::Capacity { .. } => EXIT_CAPACITY,
                CoreError::Shape { .. }
                | CoreError::SiteIndex { .. }
                | CoreError::Validation(_)
                | CoreError::Scheme(_)
                | CoreError::Parameter(_) => EXIT_USAGE,
                CoreError::SingularGeometry { .. } | CoreError::Numerical { .. } | CoreError::Fit(_) => {
                    EXIT_NUMERICAL
                }
            },
            CliError::Disagreement(_) => EXIT_NUMERICAL,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Stream(_) => 1,
        }
    }
}
