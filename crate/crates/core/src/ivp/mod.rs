//! Solution pipelines: generalized problems `phi = L^-1((L(J) + r)/f)` and
//! classical initial-value problems with `K = sum r_i` imposed derivatives.

mod moments;
mod r0;
mod report;
mod solve;
mod system;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{AnalyticExpr, EvalError, Symbol};
use crate::laplace::{ContourParams, ForcingTerm, LaplaceError};
use crate::residue::{check_poles, PoleSpec, ResidueError};

pub use moments::{compute_ln, forcing_transform, LnValues};
pub use r0::{construct_r0, R0};
pub use report::{Diagnostics, LaurentEntry, SolutionReport};
pub use solve::{
    derivative_trace, solve_classical_ivp, solve_generalized, GeneralizedSolution, IVPSolution,
};
pub use system::{assemble_ivp_system, solve_ivp_system, IvpSystem};

#[derive(Debug, Error)]
pub enum IvpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(
        "derivative order {n} needs decay faster than |s|^-{}, measured p_hat = {p_hat:.3}",
        n + 1
    )]
    InsufficientDecay { n: usize, p_hat: f64 },
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(
        "linear system for the Laurent coefficients is rank-deficient \
         (sigma_min/sigma_max = {ratio:e}); the pole configuration is not generic"
    )]
    GenericityFailure { ratio: f64 },
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Numerical thresholds of the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Smallest admissible `sigma_min/sigma_max` of the Laurent system.
    pub genericity: f64,
    /// `|f^(j)(w_i)|` above this (for `j < r_i`) means `r0` is not entire.
    pub non_entire: f64,
    /// Relative tolerance of the `L^-1(r0/f)` = residue-sum check.
    pub identity: f64,
    pub widder_bound: f64,
    pub widder_order: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            genericity: 1e-10,
            non_entire: 1e-8,
            identity: 1e-8,
            widder_bound: crate::laplace::DEFAULT_WIDDER_BOUND,
            widder_order: crate::laplace::DEFAULT_WIDDER_ORDER,
        }
    }
}

/// A generalized initial condition: the analytic function `r(s)`.
#[derive(Clone, Debug)]
pub struct GeneralizedIC {
    pub r: AnalyticExpr,
}

impl GeneralizedIC {
    pub fn new(r: AnalyticExpr) -> Self {
        GeneralizedIC { r }
    }

    pub fn zero() -> Self {
        GeneralizedIC {
            r: AnalyticExpr::constant(Complex64::new(0.0, 0.0), "s"),
        }
    }
}

/// The complete data of a classical initial-value problem.
#[derive(Clone, Debug)]
pub struct IVPProblem {
    pub symbol: Symbol,
    pub forcing: ForcingTerm,
    pub poles: Vec<PoleSpec>,
    /// `phi(0), phi'(0), ..., phi^(K-1)(0)`.
    pub initial_values: Vec<Complex64>,
    pub contour: ContourParams,
    pub tolerances: Tolerances,
}

/// Checks that the contour can carry `L(J)/f`: it must lie in the declared
/// half-plane and right of the growth bound of `J`.
pub(crate) fn check_contour(
    symbol: &Symbol,
    forcing: &ForcingTerm,
    contour: &ContourParams,
) -> Result<(), IvpError> {
    contour.validated()?;
    if contour.abscissa < symbol.region.abscissa() {
        return Err(IvpError::InvalidProblem(format!(
            "contour abscissa {} is left of the declared half-plane Re(s) > {}",
            contour.abscissa,
            symbol.region.abscissa()
        )));
    }
    if contour.abscissa <= forcing.growth() {
        return Err(IvpError::InvalidProblem(format!(
            "contour abscissa {} is not right of the growth bound {} of J",
            contour.abscissa,
            forcing.growth()
        )));
    }
    Ok(())
}

impl IVPProblem {
    pub fn new(
        symbol: Symbol,
        forcing: ForcingTerm,
        poles: Vec<PoleSpec>,
        initial_values: Vec<Complex64>,
        contour: ContourParams,
    ) -> Result<Self, IvpError> {
        let p = IVPProblem {
            symbol,
            forcing,
            poles,
            initial_values,
            contour,
            tolerances: Tolerances::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    /// `K = sum r_i`.
    pub fn k(&self) -> usize {
        self.poles.iter().map(|p| p.order).sum()
    }

    pub fn validate(&self) -> Result<(), IvpError> {
        check_contour(&self.symbol, &self.forcing, &self.contour)?;
        check_poles(&self.poles, self.contour.abscissa)?;
        if self.k() != self.initial_values.len() {
            return Err(IvpError::ShapeMismatch {
                expected: self.k(),
                got: self.initial_values.len(),
            });
        }
        Ok(())
    }
}
