use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("mesh topology error: {0}")]
    Topology(String),

    #[error("boundary label error: {0}")]
    Label(String),

    #[error("invalid material: {0}")]
    Material(String),

    #[error("invalid coefficient expression `{expr}`: {msg}")]
    Expression { expr: String, msg: String },

    #[error("unsupported polynomial order {order} (supported {min}..={max})")]
    UnsupportedOrder { order: usize, min: usize, max: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("linear solver breakdown at frequency index {index}: {msg}")]
    SolverBreakdown { index: usize, msg: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-causal data: {0}")]
    NonCausal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
