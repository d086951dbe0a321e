//! Laurent coefficients at declared poles, residue polynomials and
//! (truncated) residue sums `sum_i P_i(t) e^(w_i t)`.

mod family;
mod laurent;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::laplace::{check_times, GridFunction, LaplaceError};

pub use family::{truncated_pole_sum, FamilyReport, PoleFamily};
pub use laurent::{default_radius, laurent_coeffs, laurent_coeffs_of, LAURENT_NODES};

#[derive(Debug, Error)]
pub enum ResidueError {
    #[error("invalid pole: {0}")]
    InvalidPole(String),
    #[error("pole {0} is listed more than once")]
    DuplicatePole(Complex64),
    #[error("pole {pole} is not left of the contour abscissa {abscissa}")]
    RightOfContour { pole: Complex64, abscissa: f64 },
    #[error("expected {expected} coefficients, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("Laurent circle radius {0} must be positive and finite")]
    BadRadius(f64),
    #[error("evaluation failed at s = {s}: {source}")]
    Eval { s: Complex64, source: LaplaceError },
    #[error(
        "Laurent expansion at {pole} is ill-conditioned: coefficient {k} has size {size:e} \
         relative to the circle maximum (order too low or radius too large?)"
    )]
    IllConditioned { pole: Complex64, k: usize, size: f64 },
    #[error("pole family is not ordered by modulus at index {0}")]
    Unordered(usize),
    #[error(transparent)]
    Grid(#[from] LaplaceError),
}

/// A pole `w` of order `r >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoleSpec {
    #[serde(serialize_with = "crate::cjson::one")]
    pub location: Complex64,
    pub order: usize,
}

impl PoleSpec {
    pub fn new(location: Complex64, order: usize) -> Result<Self, ResidueError> {
        if order == 0 {
            return Err(ResidueError::InvalidPole(format!("order of {location} must be >= 1")));
        }
        if !(location.re.is_finite() && location.im.is_finite()) {
            return Err(ResidueError::InvalidPole(format!("location {location} is not finite")));
        }
        Ok(PoleSpec { location, order })
    }

    pub fn simple(location: Complex64) -> Self {
        PoleSpec { location, order: 1 }
    }
}

/// Checks that poles are pairwise distinct and strictly left of the line
/// `Re(s) = abscissa`.
pub fn check_poles(poles: &[PoleSpec], abscissa: f64) -> Result<(), ResidueError> {
    for (i, p) in poles.iter().enumerate() {
        PoleSpec::new(p.location, p.order)?;
        if !(p.location.re < abscissa) {
            return Err(ResidueError::RightOfContour {
                pole: p.location,
                abscissa,
            });
        }
        if poles[..i].iter().any(|q| q.location == p.location) {
            return Err(ResidueError::DuplicatePole(p.location));
        }
    }
    Ok(())
}

/// `P(t) = sum_k a_k t^(k-1)/(k-1)!` attached to a pole; the pole
/// contributes `P(t) e^(w t)` to the solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResiduePolynomial {
    pub pole: PoleSpec,
    #[serde(serialize_with = "crate::cjson::many")]
    pub coeffs: Vec<Complex64>,
}

/// Polynomial with `P^(k)(0) = coeffs[k]` for the given pole.
pub fn residue_polynomial(
    pole: PoleSpec,
    coeffs: Vec<Complex64>,
) -> Result<ResiduePolynomial, ResidueError> {
    if coeffs.len() != pole.order {
        return Err(ResidueError::ShapeMismatch {
            expected: pole.order,
            got: coeffs.len(),
        });
    }
    Ok(ResiduePolynomial { pole, coeffs })
}

impl ResiduePolynomial {
    /// Horner evaluation of `P(t)`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            // a_(k+1) t^k / k!, nested as (..((a_r t/(r-1) + a_(r-1)) t/(r-2) + ..)
            acc = if k + 1 == self.coeffs.len() {
                *a
            } else {
                acc * (t / (k + 1) as f64) + a
            };
        }
        acc
    }

    /// `P^(j)(0) = a_(j+1)`, zero past the degree.
    pub fn derivative_at_zero(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    /// `P(t) e^(w t)`
    pub fn term(&self, t: f64) -> Complex64 {
        self.eval(t) * (self.pole.location * t).exp()
    }

    /// `d^n/dt^n [P(t) e^(w t)]` at 0: `sum_k C(n,k) w^k P^(n-k)(0)`.
    pub fn term_derivative_at_zero(&self, n: usize) -> Complex64 {
        let w = self.pole.location;
        let mut binom = 1.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            let j = n - k;
            if j < self.coeffs.len() {
                acc += self.coeffs[j] * w.powu(k as u32) * binom;
            }
        }
        acc
    }

    pub fn conj(&self) -> ResiduePolynomial {
        ResiduePolynomial {
            pole: PoleSpec {
                location: self.pole.location.conj(),
                order: self.pole.order,
            },
            coeffs: self.coeffs.iter().map(|a| a.conj()).collect(),
        }
    }
}

fn sum_terms(polys: &[ResiduePolynomial], times: &[f64]) -> Vec<Complex64> {
    times
        .par_iter()
        .map(|&t| polys.iter().map(|p| p.term(t)).sum())
        .collect()
}

/// `sum_i P_i(t) e^(w_i t)` on `times`.
pub fn residue_sum(
    polys: &[ResiduePolynomial],
    times: &[f64],
) -> Result<GridFunction, ResidueError> {
    check_times(times)?;
    for (i, p) in polys.iter().enumerate() {
        if polys[..i].iter().any(|q| q.pole.location == p.pole.location) {
            return Err(ResidueError::DuplicatePole(p.pole.location));
        }
    }
    Ok(GridFunction::new(times.to_vec(), sum_terms(polys, times))?)
}
