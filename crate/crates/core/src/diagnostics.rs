//! Non-fatal diagnostics shared by all pipelines.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

/// A condition worth reporting that does not invalidate the result.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The `(2T, h/2)` refinement moved the result by more than the tolerance.
    Convergence { max_change: f64, tolerance: f64 },
    /// The transform does not decay along the contour, so no classical
    /// derivative of the Bromwich part is certified.
    NoSmoothing { p_hat: f64 },
    /// The sampled Widder ratio exceeded its bound.
    Widder { worst_ratio: f64, bound: f64 },
    /// `f` does not vanish to the pole order at a declared pole, so `r0`
    /// inherits a pole there.
    NonEntire {
        #[serde(serialize_with = "crate::cjson::one")]
        pole: Complex64,
        order: usize,
        value: f64,
    },
    /// The truncated derivative series has not settled at its last orders.
    Tail { tail: f64 },
    /// A region or heuristic check could not evaluate some sample points.
    Sampling { message: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Convergence {
                max_change,
                tolerance,
            } => write!(
                f,
                "refined contour changed the result by {max_change:e} (tolerance {tolerance:e})"
            ),
            Warning::NoSmoothing { p_hat } => {
                write!(f, "transform decays like |s|^-{p_hat:.3}; no smoothing certified")
            }
            Warning::Widder { worst_ratio, bound } => write!(
                f,
                "Widder heuristic ratio {worst_ratio:e} exceeds bound {bound:e} (heuristic, not a certificate)"
            ),
            Warning::NonEntire { pole, order, value } => write!(
                f,
                "f does not vanish to order {order} at {pole} (|f^(j)| up to {value:e}); r0 is not entire"
            ),
            Warning::Tail { tail } => write!(f, "truncated series tail {tail:e} above 1e-12"),
            Warning::Sampling { message } => f.write_str(message),
        }
    }
}
