use thiserror::Error;

/// Errors produced by the numeric and protocol layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("size cap exceeded: {0}")]
    Size(String),

    #[error("matrix is not Hermitian (max |M - M†| entry = {deviation:.3e}, tolerance {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("not a density operator: {0}")]
    InvalidState(String),

    #[error("infeasible attack parameters: {constraint} = {value:.6e} < 0")]
    Infeasible { constraint: &'static str, value: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("root finding failed: {0}")]
    RootFind(String),
}

pub type Result<T> = std::result::Result<T, Error>;
