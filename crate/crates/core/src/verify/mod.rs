//! Independent checks: applying `f(d/dt)` to closed-form functions as the
//! truncated series `sum_n c_n phi^(n)`, and the remainder series `r_d`.

mod apply;
mod remainder;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::EvalError;
use crate::laplace::LaplaceError;

pub use apply::{
    apply_symbol, residual_norm, verify_target, Applied, SmoothVector, VerificationReport,
    VerifyTarget, DEFAULT_TRUNCATION, TAIL_TOL,
};
pub use remainder::{build_remainder_series, GrowthCertificate, RemainderSeries, RemainderValue};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("s = {s} is not right of the half-plane abscissa {abscissa}")]
    OutsideRegion { s: Complex64, abscissa: f64 },
    #[error("truncation order must be at least 1")]
    BadTruncation,
    #[error("remainder series diverges: |partial sum| grew over the last 10 terms (n = {n}, |S| = {modulus:e})")]
    DivergenceDetected { n: usize, modulus: f64 },
    #[error("growth certificate |d_j| <= {c} * {r}^j fails at j = {j}")]
    Certificate { c: f64, r: f64, j: usize },
    #[error("unsupported target: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
}
