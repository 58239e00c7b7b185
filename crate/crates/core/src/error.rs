use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The simultaneous root iteration hit its iteration cap. `best` holds the
    /// last iterate so callers can still inspect it.
    #[error("root iteration did not converge after {iterations} iterations")]
    Convergence {
        iterations: usize,
        best: Vec<Complex64>,
    },

    #[error("eigenvector for {eigenvalue} did not reach residual {tolerance:e} (got {residual:e})")]
    Eigenvector {
        eigenvalue: Complex64,
        residual: f64,
        tolerance: f64,
    },

    #[error("eigenvalues {0} and {1} are not degenerate within {2:e}")]
    NotDegenerate(Complex64, Complex64, f64),

    #[error("cannot identify a coalescing eigenvalue cluster; refine the point or pass a target energy")]
    AmbiguousCluster,

    #[error("order fit failed: {0}")]
    OrderFit(String),

    #[error("gap closes at |v| = |w| = {0}; winding number undefined")]
    GapClosing(f64),

    #[error("propagator: {0}")]
    Propagator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
