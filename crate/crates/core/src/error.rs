use thiserror::Error;

/// Errors produced by instance construction, validation, and solving.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition (dimension mismatch,
    /// non-unit direction, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The input is syntactically valid but geometrically degenerate
    /// (coincident points, zero-length reference edge, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// The problem instance does not admit a well-defined solve
    /// (disconnected observation graph, rank-deficient stationarity system).
    #[error("infeasible input: {0}")]
    InfeasibleInput(String),
    /// A text-format instance file failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
