use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const DATA: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const INCOMPATIBLE: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dynmix::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {}: {detail}", path.display())]
    Manifest { path: PathBuf, detail: String },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Manifest { .. } => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &dynmix::Error) -> u8 {
    use dynmix::Error as E;
    match e {
        E::Config(_) => exit::USAGE,
        E::Data(_) => exit::DATA,
        E::Incompatible(_) => exit::INCOMPATIBLE,
        E::AtIteration { source, .. } => core_exit_code(source),
        E::Linalg(_) | E::Numeric { .. } | E::IndexOutOfRange { .. } => exit::NUMERIC,
    }
}
