use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (expected {expected})")]
    BadIndex { index: usize, expected: &'static str },

    #[error("steady state is not unique: {count} eigenvalues within tolerance of the fixed-point value")]
    DegenerateSteadyState { count: usize },

    #[error("fixed-point iteration did not converge (residual {residual:.3e} after {iterations} iterations)")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("state is not stationary (residual {residual:.3e})")]
    NotSteady { residual: f64 },

    #[error("operation requires at least one record")]
    Empty,

    #[error("{0}")]
    Parse(String),
}
