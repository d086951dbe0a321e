//! Forward Laplace transforms and numerical Bromwich inversion, with the
//! heuristic decay and Widder-space checks used by the solvers.

mod bromwich;
mod contour;
mod decay;
mod forcing;
mod grid;
pub mod quad;
mod widder;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::EvalError;

pub use bromwich::{
    bromwich_invert, bromwich_sum, invert_sampled, Inversion, LineSamples, Refinement, TailModel,
};
pub use contour::ContourParams;
pub use decay::{estimate_decay, DecayEstimate};
pub use forcing::{laplace_forward, ExpPoly, ExpTerm, ForcingTerm};
pub use grid::{check_times, uniform_times, GridFunction};
pub use widder::{
    default_s_grid, widder_heuristic, WidderReport, DEFAULT_WIDDER_BOUND, DEFAULT_WIDDER_ORDER,
};

/// A transform evaluable at complex points. Any thread-safe closure
/// `Fn(Complex64) -> Result<Complex64, LaplaceError>` qualifies; expression
/// errors convert with `?`.
pub trait Transform: Fn(Complex64) -> Result<Complex64, LaplaceError> + Sync {}

impl<F> Transform for F where F: Fn(Complex64) -> Result<Complex64, LaplaceError> + Sync {}

#[derive(Debug, Error)]
pub enum LaplaceError {
    #[error("Re(s) = {} is not above the growth bound {growth} of J", .s.re)]
    Domain { s: Complex64, growth: f64 },
    #[error("quadrature of the forward transform did not reach its tail bound at s = {s}")]
    QuadratureFailure { s: Complex64 },
    #[error("transform evaluation failed at s = {s}: {source}")]
    Transform {
        s: Complex64,
        source: Box<LaplaceError>,
    },
    #[error("invalid contour {0:?}: need finite abscissa, 0 < step < half_height, tolerance > 0")]
    InvalidContour(ContourParams),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("invalid forcing term: {0}")]
    Forcing(String),
    #[error("refined contour changed the result by {max_change:e} (tolerance {tolerance:e})")]
    NotConverged { max_change: f64, tolerance: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
