//! Laplace-transform functional calculus for linear nonlocal equations
//! `f(d/dt) phi = J` on `t >= 0`.
//!
//! * [`expr`]: analytic expressions for symbols, forcing terms and test
//!   functions (parse, evaluate, differentiate, Taylor coefficients).
//! * [`laplace`]: forward transforms, Bromwich inversion, decay and
//!   Widder heuristics.
//! * [`residue`]: Laurent coefficients, residue polynomials and pole sums.
//! * [`ivp`]: generalized and classical initial-value pipelines.
//! * [`verify`]: truncated-series application of `f(d/dt)` and the
//!   remainder series.
//!
//! ```
//! use nonlocal_core::expr::{parse_expr, GammaRegion, Symbol};
//! use nonlocal_core::ivp::{solve_classical_ivp, IVPProblem};
//! use nonlocal_core::laplace::{uniform_times, ContourParams, ForcingTerm};
//! use nonlocal_core::residue::PoleSpec;
//! use num_complex::Complex64;
//!
//! // phi'' + phi = 0, phi(0) = 1, phi'(0) = 0
//! let f = Symbol::new(parse_expr("s^2 + 1")?, GammaRegion::new(10.0, 0.0)?);
//! let i = Complex64::i();
//! let problem = IVPProblem::new(
//!     f,
//!     ForcingTerm::zero(),
//!     vec![PoleSpec::simple(i), PoleSpec::simple(-i)],
//!     vec![1.0.into(), 0.0.into()],
//!     ContourParams::default(),
//! )?;
//! let sol = solve_classical_ivp(&problem, &uniform_times(0.0, 10.0, 101))?;
//! for (t, v) in sol.total().iter() {
//!     assert!((v.re - t.cos()).abs() < 1e-10);
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub(crate) mod cjson;
pub mod diagnostics;
pub mod expr;
pub mod laplace;
pub mod ivp;
pub mod residue;
pub mod verify;

pub use diagnostics::Warning;

use thiserror::Error;

/// Any error of the library, tagged with the module it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expr: {0}")]
    Parse(#[from] expr::ParseError),
    #[error("expr: {0}")]
    Eval(#[from] expr::EvalError),
    #[error("expr: {0}")]
    Region(#[from] expr::RegionError),
    #[error("expr: {0}")]
    Root(#[from] expr::RootError),
    #[error("laplace: {0}")]
    Laplace(#[from] laplace::LaplaceError),
    #[error("residue: {0}")]
    Residue(#[from] residue::ResidueError),
    #[error("ivp: {0}")]
    Ivp(#[from] ivp::IvpError),
    #[error("verify: {0}")]
    Verify(#[from] verify::VerifyError),
}

impl Error {
    /// Name of the module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Parse(_) | Error::Eval(_) | Error::Region(_) | Error::Root(_) => "expr",
            Error::Laplace(_) => "laplace",
            Error::Residue(_) => "residue",
            Error::Ivp(_) => "ivp",
            Error::Verify(_) => "verify",
        }
    }
}
