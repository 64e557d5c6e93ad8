use thiserror::Error;

pub type Result<T> = std::result::Result<T, ForestSimError>;

#[derive(Debug, Error)]
pub enum ForestSimError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("{what}: graph has {n} nodes, above the limit of {limit}{hint}")]
    SizeLimit {
        what: &'static str,
        n: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("solver did not converge after {iterations} iterations (worst relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("k = {k} out of range 1..={max}")]
    BadK { k: usize, max: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("labels: {0}")]
    Labels(String),

    #[error("graph fingerprint mismatch: index was built for {expected}, graph is {actual}")]
    Fingerprint { expected: String, actual: String },

    #[error("index format: {0}")]
    Format(String),

    #[error("time budget exhausted")]
    Interrupted,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
