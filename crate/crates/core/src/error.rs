//! Library error type.

/// Failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Graph construction or generation failed.
    #[error("graph error: {0}")]
    Graph(String),
    /// Inputs whose shapes do not match the graph or each other.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A diagonal Hessian block lost positive definiteness, which violates
    /// the strong-convexity assumptions the splitting relies on.
    #[error("diagonal block at node {node} is not positive definite")]
    NotPositiveDefinite { node: usize },
    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error("solver stalled: {0}")]
    SolverStall(String),
    /// Invalid method or problem configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
