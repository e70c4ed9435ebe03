use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    /// The input parsed but is not a valid configuration.
    #[error("invalid input: {0}")]
    Invalid(projshape_core::Error),
    #[error(transparent)]
    Domain(#[from] projshape_core::Error),
}

impl Error {
    /// 1 for failures of the analysis itself, 2 for bad invocations or input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
