use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("simplex must contain at least one vertex")]
    EmptySimplex,
    #[error("vertex {vertex} appears more than once in tuple {tuple:?}")]
    DuplicateVertexInTuple { vertex: usize, tuple: Vec<usize> },
    #[error("face map is undefined on a 0-simplex")]
    ZeroDimensional,
    #[error("simplex ({dim}, {index}) is not in the complex")]
    UnknownSimplex { dim: usize, index: usize },
    #[error("face index {index} out of range (at most {max})")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid adjacency: {0}")]
    InvalidAdjacency(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge community {0} has no edges")]
    EmptyCommunity(usize),
    #[error("invalid generator configuration: {0}")]
    InvalidSpec(String),
    #[error("malformed dataset: {0}")]
    Malformed(String),
}
