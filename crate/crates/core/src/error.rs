use thiserror::Error;

/// Errors shared across the crate. Each operation documents which variants it
/// can produce; anything not listed is a bug.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("axis {axis} out of range for boundary dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("series truncation {got} too low; need at least {need}")]
    TruncationTooLow { got: usize, need: usize },

    #[error("matrix not invertible at node {node}")]
    SingularMatrix { node: usize },

    #[error("leading metric coefficient not positive definite at node {node}")]
    NotPositiveDefinite { node: usize },

    #[error("tensor not trace-free: max |trace| = {max_trace:.3e}")]
    NotTraceFree { max_trace: f64 },

    #[error("boundary metric is not Einstein with the declared normalization: residual {residual:.3e}")]
    NotEinstein { residual: f64 },

    #[error("negative-power coefficient fails to cancel (first-order coefficient of the tangential expansion must vanish): residual {residual:.3e}")]
    SingularStructure { residual: f64 },

    #[error("substitution series must have zero constant term")]
    NotComposable,

    #[error("substitution series must be tangent to the identity")]
    NotTangentToIdentity,

    #[error("{what} = {value} outside valid domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("operation requires odd bulk dimension n; got n = {n}")]
    EvenDimension { n: usize },

    #[error("cross-term residual {residual:.3e} at order {order} exceeds tolerance (evenness assumptions violated)")]
    CrossTermResidual { order: usize, residual: f64 },

    #[error("solver failed to converge: {0}")]
    NonConvergence(String),

    #[error("solver fault: {0}")]
    SolverFault(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
