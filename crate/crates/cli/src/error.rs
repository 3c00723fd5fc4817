use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Complex(#[from] dirsimplex::Error),
    #[error(transparent)]
    Model(#[from] dirsimplex_nn::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 2 for bad input or configuration, 3 for failures while running.
    pub fn exit_code(&self) -> u8 {
        use dirsimplex::Error as C;
        use dirsimplex_nn::Error as M;
        match self {
            CliError::Validation(_) => 2,
            CliError::Complex(C::EmptyCommunity(_) | C::Malformed(_)) => 3,
            CliError::Complex(_) => 2,
            CliError::Model(M::InvalidModel(_) | M::ShapeMismatch { .. }) => 2,
            CliError::Model(M::Complex(_)) => 2,
            CliError::Model(_) | CliError::Io { .. } | CliError::Runtime(_) => 3,
        }
    }
}

pub fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

pub fn write(path: &std::path::Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_owned(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}
