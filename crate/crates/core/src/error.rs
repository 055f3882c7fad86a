use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("node {node} has class {class}, but only {class_count} classes are declared")]
    LabelOutOfRange {
        node: usize,
        class: usize,
        class_count: usize,
    },
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { u: usize, v: usize, weight: f64 },
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("invalid class matrix: {0}")]
    InvalidMatrix(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("parse error at {path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
