use thiserror::Error;

pub type Result<T> = std::result::Result<T, FracError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Newton iteration for quadrature nodes failed to settle.
    #[error("node {node} of the {size}-point rule did not converge after {iterations} iterations (last step {last_step:e})")]
    NodeConvergence {
        size: usize,
        node: usize,
        iterations: usize,
        last_step: f64,
    },

    /// Fixed-point iteration for the Fourier coefficients did not reach tolerance.
    #[error("fixed-point iteration did not converge: {iterations} iterations, residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("non-finite right-hand side at iteration {iteration}, node {node} (t = {t}, y = {y})")]
    NonFinite {
        iteration: usize,
        node: usize,
        t: f64,
        y: f64,
    },

    /// The extended-precision oracle cannot guarantee its digit budget.
    #[error("digit budget exceeded: {0}")]
    DigitBudget(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FracError {
    fn from(e: std::io::Error) -> Self {
        FracError::Io(e.to_string())
    }
}
