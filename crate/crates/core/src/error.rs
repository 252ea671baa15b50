use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shape: expected {expected}, got {rows}x{cols}")]
    InvalidShape {
        expected: String,
        rows: usize,
        cols: usize,
    },
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("hermiticity error: max |m - m^dagger| = {deviation:e} exceeds tolerance {tol:e}")]
    Hermiticity { deviation: f64, tol: f64 },
    #[error("trace error: trace = {trace} (must be 1 within {tol:e})")]
    Trace { trace: f64, tol: f64 },
    #[error("positivity error: minimum eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    Positivity { min_eigenvalue: f64, tol: f64 },
    #[error("normalization error: squared norm {norm_sqr} differs from 1")]
    Normalization { norm_sqr: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("frame mismatch: P- rho P- differs from rho by {residual:e}")]
    FrameMismatch { residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
