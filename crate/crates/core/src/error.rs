use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge within {iterations} iterations")]
    ConvergenceFailure { what: &'static str, iterations: usize },

    #[error("contour quadrature inaccurate: imaginary residue {imag:e} exceeds {tol:e}")]
    ContourAccuracy { imag: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("history has {len} entries, index {n} requested")]
    HistoryIndex { n: usize, len: usize },

    #[error("matrix is not positive definite (pivot {value:e} at row {row})")]
    NotPositiveDefinite { row: usize, value: f64 },

    #[error("conjugate gradients stalled after {iterations} iterations, relative residual {residual:e}")]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("degenerate cell {cell} (measure {measure:e})")]
    DegenerateCell { cell: usize, measure: f64 },

    #[error("Newton iteration diverged at step {step}: residual trace {trace:?}")]
    NewtonDivergence { step: usize, trace: Vec<f64> },

    #[error(
        "shock guard: 1 - 2k u fell to {min_coefficient:e} at step {step} (t = {time}); \
         the nonlinear coefficient is degenerating"
    )]
    Degeneracy {
        step: usize,
        time: f64,
        min_coefficient: f64,
    },

    #[error("time grids are not nested: {0}")]
    GridMismatch(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}
