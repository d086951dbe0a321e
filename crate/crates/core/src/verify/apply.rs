use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::VerifyError;
use crate::diagnostics::Warning;
use crate::expr::{diff_expr, taylor_coeffs, AnalyticExpr, EvalError, Symbol};
use crate::ivp::{GeneralizedSolution, IVPSolution};
use crate::laplace::{check_times, ForcingTerm, GridFunction};

pub const DEFAULT_TRUNCATION: usize = 40;
/// Largest admissible size of the first omitted terms of the series.
pub const TAIL_TOL: f64 = 1e-12;
/// Orders past the truncation inspected for the tail estimate.
const TAIL_ORDERS: usize = 3;

/// A closed-form function of `t` whose derivatives are taken symbolically.
#[derive(Clone, Debug)]
pub struct SmoothVector {
    expr: AnalyticExpr,
}

impl SmoothVector {
    pub fn new(expr: AnalyticExpr) -> Result<Self, VerifyError> {
        if let Some(p) = expr.unbound().into_iter().next() {
            return Err(VerifyError::Eval(EvalError::UnboundParameter(p)));
        }
        Ok(SmoothVector {
            expr: expr.inline_params(),
        })
    }

    pub fn expr(&self) -> &AnalyticExpr {
        &self.expr
    }

    /// `phi, phi', ..., phi^(n_max)`.
    pub fn derivatives(&self, n_max: usize) -> Vec<AnalyticExpr> {
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(self.expr.clone());
        for n in 1..=n_max {
            let next = diff_expr(&out[n - 1], 1);
            out.push(next);
        }
        out
    }
}

/// What a verification is asked to check.
#[derive(Clone, Debug)]
pub enum VerifyTarget {
    Smooth(SmoothVector),
    /// Only known on a grid; cannot be differentiated to high order.
    Sampled(GridFunction),
}

impl VerifyTarget {
    /// The closed form when the solution has one (`J = 0`), else its grid.
    pub fn from_solution(sol: &IVPSolution) -> Self {
        match sol.closed_form() {
            Some(e) => VerifyTarget::Smooth(SmoothVector { expr: e }),
            None => VerifyTarget::Sampled(sol.total()),
        }
    }

    pub fn from_generalized(sol: &GeneralizedSolution) -> Self {
        VerifyTarget::Sampled(sol.solution().clone())
    }
}

/// `sum_{n<=n_trunc} c_n phi^(n)` on a grid, with the size of the first
/// omitted terms.
#[derive(Clone, Debug)]
pub struct Applied {
    pub values: GridFunction,
    pub tail: f64,
    pub warnings: Vec<Warning>,
}

/// `f(d/dt) phi` as the truncated series `sum_{n<=n_trunc} c_n phi^(n)(t)`
/// with `c_n = f^(n)(0)/n!`.
///
/// The tail is `max |c_n phi^(n)(t)|` over the grid for the three orders
/// after the truncation; above [`TAIL_TOL`] it is reported as a warning.
pub fn apply_symbol(
    f: &Symbol,
    phi: &SmoothVector,
    times: &[f64],
    n_trunc: usize,
) -> Result<Applied, VerifyError> {
    check_times(times)?;
    let n_max = n_trunc + TAIL_ORDERS;
    let c = taylor_coeffs(&f.expr, n_max, f.taylor_radius())?.coeffs;
    let ders = phi.derivatives(n_max);
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<(Complex64, f64)> = times
        .par_iter()
        .map(|&t| -> Result<(Complex64, f64), VerifyError> {
            let z = Complex64::new(t, 0.0);
            let mut sum = zero;
            let mut tail = 0.0_f64;
            for (n, d) in ders.iter().enumerate() {
                if c[n] == zero {
                    continue;
                }
                let term = c[n] * d.eval_shared(z)?;
                if n <= n_trunc {
                    sum += term;
                } else {
                    tail = tail.max(term.norm());
                }
            }
            Ok((sum, tail))
        })
        .collect::<Result<_, _>>()?;
    let tail = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let values = GridFunction::new(times.to_vec(), rows.into_iter().map(|r| r.0).collect())?;
    let warnings = if tail > TAIL_TOL {
        vec![Warning::Tail { tail }]
    } else {
        Vec::new()
    };
    Ok(Applied {
        values,
        tail,
        warnings,
    })
}

/// Verification report: `{residual, n_trunc, tail, warnings}`.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub residual: f64,
    pub n_trunc: usize,
    pub tail: f64,
    pub warnings: Vec<Warning>,
}

/// `max_t |f(d/dt) phi (t) - J(t)|` over the grid, with tail diagnostics.
/// Grid-only targets are `Unsupported`.
pub fn verify_target(
    f: &Symbol,
    target: &VerifyTarget,
    j: &ForcingTerm,
    times: &[f64],
    n_trunc: usize,
) -> Result<VerificationReport, VerifyError> {
    let phi = match target {
        VerifyTarget::Smooth(p) => p,
        VerifyTarget::Sampled(_) => {
            return Err(VerifyError::Unsupported(
                "the solution is only known on a grid (no closed form); \
                 high-order derivatives cannot be verified"
                    .into(),
            ))
        }
    };
    let applied = apply_symbol(f, phi, times, n_trunc)?;
    let mut residual = 0.0_f64;
    for (t, v) in applied.values.iter() {
        residual = residual.max((v - j.eval(t)?).norm());
    }
    Ok(VerificationReport {
        residual,
        n_trunc,
        tail: applied.tail,
        warnings: applied.warnings,
    })
}

/// The residual of [`verify_target`] alone.
pub fn residual_norm(
    f: &Symbol,
    target: &VerifyTarget,
    j: &ForcingTerm,
    times: &[f64],
    n_trunc: usize,
) -> Result<f64, VerifyError> {
    Ok(verify_target(f, target, j, times, n_trunc)?.residual)
}
