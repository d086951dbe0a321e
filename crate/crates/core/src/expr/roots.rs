use num_complex::Complex64;
use thiserror::Error;

use super::{diff_expr, AnalyticExpr, EvalError};

const MAX_ITERATIONS: usize = 100;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RootError {
    #[error("Newton iteration did not converge; last iterate {last}")]
    NoConvergence { last: Complex64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Newton iteration from `seed`. Succeeds with `|f(z)| <= tol` once the
/// step has also stalled (`|dz| <= 1e-6 max(1, |z|)`), within 100 steps.
pub fn find_zero(e: &AnalyticExpr, seed: Complex64, tol: f64) -> Result<Complex64, RootError> {
    let de = diff_expr(e, 1);
    let mut z = seed;
    for _ in 0..MAX_ITERATIONS {
        let fz = e.eval(z)?;
        let dfz = de.eval(z)?;
        if dfz.norm() == 0.0 {
            if fz.norm() <= tol {
                return Ok(z);
            }
            return Err(RootError::NoConvergence { last: z });
        }
        let step = fz / dfz;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(RootError::NoConvergence { last: z + step });
        }
        if step.norm() <= 1e-6 * z.norm().max(1.0) && e.eval(z)?.norm() <= tol {
            return Ok(z);
        }
    }
    Err(RootError::NoConvergence { last: z })
}
