use thiserror::Error;

use geomtype::error::{CoverError, PathError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: geomtype::error::ParseError },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Lib(#[from] geomtype::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(geomtype::Error::Cover(CoverError::Budget { .. }))
            | CliError::Lib(geomtype::Error::Path(PathError::Cover(CoverError::Budget { .. }))) => 3,
            _ => 2,
        }
    }
}

macro_rules! lib_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Lib(e.into())
            }
        }
    )*};
}

lib_from!(
    geomtype::error::ModelError,
    geomtype::error::SymbolicError,
    geomtype::error::MoveError,
    CoverError,
    PathError,
    geomtype::error::SurgeryError
);
