use thiserror::Error;

#[derive(Debug, Error)]
pub enum KronError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("index {index:?} out of range for dims {dims:?}")]
    IndexOutOfRange { index: Vec<usize>, dims: Vec<usize> },

    #[error("materializing {needed} elements exceeds the budget of {budget} (set KRONTEN_BUDGET to raise it)")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("tensor is not supersymmetric within {tol:e}")]
    NotSupersymmetric { tol: f64 },

    #[error("no start converged: {0}")]
    NoConvergence(String),

    #[error("eigen kinds differ: {0} vs {1}")]
    KindMismatch(String, String),

    #[error("decomposition flavors differ: {0:?} vs {1:?}")]
    FlavorMismatch(crate::decomp::Flavor, crate::decomp::Flavor),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("no positive eigenvector found among converged pairs")]
    NoPositiveEigenvector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = KronError> = std::result::Result<T, E>;
