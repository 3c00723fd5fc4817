use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    ShapeMismatch { context: String, expected: String, found: String },
    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize, loss: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Complex(#[from] dirsimplex::Error),
}

pub(crate) fn shape_mismatch(context: impl Into<String>, expected: impl ToString, found: impl ToString) -> Error {
    Error::ShapeMismatch { context: context.into(), expected: expected.to_string(), found: found.to_string() }
}
