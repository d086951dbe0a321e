use std::f64::consts::PI;

use num_complex::Complex64;

use super::{diff_expr, AnalyticExpr, EvalError};

/// Derivatives with more distinct nodes than this switch the expansion to
/// quadrature.
pub const SYMBOLIC_NODE_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaylorMethod {
    Symbolic,
    Cauchy,
}

#[derive(Clone, Debug)]
pub struct TaylorCoeffs {
    /// `coeffs[n] = f^(n)(0) / n!`
    pub coeffs: Vec<Complex64>,
    pub method: TaylorMethod,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Taylor coefficients at the origin by repeated symbolic differentiation.
/// Returns `Ok(None)` as soon as a derivative exceeds `node_budget`
/// distinct nodes.
pub fn taylor_coeffs_symbolic(
    e: &AnalyticExpr,
    n_max: usize,
    node_budget: usize,
) -> Result<Option<Vec<Complex64>>, EvalError> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut d = e.inline_params();
    for n in 0..=n_max {
        if d.root().dag_size_up_to(node_budget) > node_budget {
            return Ok(None);
        }
        out.push(d.eval_shared(zero)? / factorial(n));
        if n < n_max {
            d = diff_expr(&d, 1);
        }
    }
    Ok(Some(out))
}

/// Taylor coefficients from the Cauchy integral on `|s| = radius`,
/// trapezoid rule with `max(4 n_max, 64)` nodes.
pub fn taylor_coeffs_cauchy(
    e: &AnalyticExpr,
    n_max: usize,
    radius: f64,
) -> Result<Vec<Complex64>, EvalError> {
    let nodes = (4 * n_max).max(64);
    let samples: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / nodes as f64;
            e.eval(Complex64::from_polar(radius, theta))
        })
        .collect::<Result<_, _>>()?;
    let coeffs = (0..=n_max)
        .map(|n| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let theta = 2.0 * PI * ((j * n) % nodes) as f64 / nodes as f64;
                    v * Complex64::from_polar(1.0, -theta)
                })
                .sum();
            sum / (nodes as f64 * radius.powi(n as i32))
        })
        .collect();
    Ok(coeffs)
}

/// `c_n = f^(n)(0)/n!` for `n = 0..=n_max`.
///
/// Symbolic while every derivative stays within
/// [`SYMBOLIC_NODE_BUDGET`] nodes, Cauchy quadrature on `|s| = radius`
/// otherwise. `radius` must lie inside the disk of analyticity.
pub fn taylor_coeffs(
    e: &AnalyticExpr,
    n_max: usize,
    radius: f64,
) -> Result<TaylorCoeffs, EvalError> {
    if let Some(coeffs) = taylor_coeffs_symbolic(e, n_max, SYMBOLIC_NODE_BUDGET)? {
        return Ok(TaylorCoeffs {
            coeffs,
            method: TaylorMethod::Symbolic,
        });
    }
    Ok(TaylorCoeffs {
        coeffs: taylor_coeffs_cauchy(e, n_max, radius)?,
        method: TaylorMethod::Cauchy,
    })
}
