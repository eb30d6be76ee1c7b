use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature under-resolved: self-estimated error {estimate:.3e} exceeds {budget:.3e}")]
    Accuracy { estimate: f64, budget: f64 },

    #[error("point ({r:.6}, {z:.6}) outside chart validity region: {reason}")]
    ChartDomain { r: f64, z: f64, reason: String },

    #[error("nodal extraction failed: no sign change in {} column(s), first indices {:?}", columns.len(), &columns[..columns.len().min(8)])]
    Extraction { columns: Vec<usize> },

    #[error("ansatz construction failed at {count} node(s), first (i, j) = {first:?}")]
    Construction { count: usize, first: (usize, usize) },

    #[error("Newton did not converge in {iters} iterations; residual history {history:?}")]
    Nonconvergence { iters: usize, history: Vec<f64> },

    #[error("Newton diverged: residual {current:.3e} exceeds 10x initial {initial:.3e}")]
    Divergence { current: f64, initial: f64 },

    #[error("reduced trajectory reached a vertical tangent (mu -> r) at r = {r:.6e}")]
    BlowUp { r: f64 },

    #[error("integrator step underflow at r = {r:.6e} (step {step:.3e})")]
    Stiffness { r: f64, step: f64 },

    #[error("interface decomposition failed at slice r1 = {r1:.6}: {reason}")]
    Decomposition { r1: f64, reason: String },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("continuation cannot start: {0}")]
    CannotStart(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
