use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::{sum_terms, ResidueError, ResiduePolynomial};
use super::{residue_polynomial, PoleSpec};
use crate::laplace::{check_times, GridFunction};

type Generator = dyn Fn(usize) -> ResiduePolynomial + Send + Sync;

/// An infinite pole family given by a closed-form generator
/// `n -> (w_n, r_n, coefficients)`, ordered by nondecreasing `|w_n|`.
///
/// A conjugate-closed family generates one member of each conjugate pair;
/// every non-real generated pole also contributes its mirror image with
/// conjugated coefficients.
#[derive(Clone)]
pub struct PoleFamily {
    generator: Arc<Generator>,
    conjugate_closed: bool,
    label: String,
}

impl fmt::Debug for PoleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoleFamily")
            .field("label", &self.label)
            .field("conjugate_closed", &self.conjugate_closed)
            .finish()
    }
}

impl PoleFamily {
    pub fn new<F>(label: impl Into<String>, conjugate_closed: bool, generator: F) -> Self
    where
        F: Fn(usize) -> ResiduePolynomial + Send + Sync + 'static,
    {
        PoleFamily {
            generator: Arc::new(generator),
            conjugate_closed,
            label: label.into(),
        }
    }

    /// A fixed list of poles. Callers must not ask for more than
    /// `polys.len()` terms.
    pub fn finite(polys: Vec<ResiduePolynomial>) -> Self {
        let n = polys.len();
        PoleFamily::new(format!("finite family of {n} poles"), false, move |i| {
            polys[i].clone()
        })
    }

    /// Poles of `2 phi0 / (s (1 + e^(a s)))`: `s = 0` with residue `phi0`
    /// and `(2n - 1) pi i / a` with residue `-2 phi0 / (a w)`, conjugates
    /// implied. The sum is the square wave that is 0 on `[2na, (2n+1)a)`
    /// and `2 phi0` on `[(2n+1)a, (2n+2)a)`.
    pub fn square_wave(a: f64, phi0: f64) -> Self {
        PoleFamily::new(
            format!("square wave, a = {a}, phi0 = {phi0}"),
            true,
            move |n| {
                if n == 0 {
                    return ResiduePolynomial {
                        pole: PoleSpec::simple(Complex64::new(0.0, 0.0)),
                        coeffs: vec![Complex64::new(phi0, 0.0)],
                    };
                }
                let w = Complex64::new(0.0, (2 * n - 1) as f64 * PI / a);
                ResiduePolynomial {
                    pole: PoleSpec::simple(w),
                    coeffs: vec![-2.0 * phi0 / (a * w)],
                }
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_conjugate_closed(&self) -> bool {
        self.conjugate_closed
    }

    /// Member `n` together with its implied conjugate, if any.
    pub fn member(&self, n: usize) -> Vec<ResiduePolynomial> {
        let p = (self.generator)(n);
        if self.conjugate_closed && p.pole.location.im != 0.0 {
            let q = p.conj();
            vec![p, q]
        } else {
            vec![p]
        }
    }
}

/// Convergence report for [`truncated_pole_sum`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub count: usize,
    /// `max_t |last member's contribution|`, a rough tail-size indicator.
    pub tail_estimate: f64,
    pub caveats: Vec<String>,
}

/// Partial sum over the first `count` family members.
pub fn truncated_pole_sum(
    family: &PoleFamily,
    count: usize,
    times: &[f64],
) -> Result<(GridFunction, FamilyReport), ResidueError> {
    check_times(times)?;
    if count == 0 {
        return Err(ResidueError::InvalidPole("count must be >= 1".into()));
    }
    let mut polys = Vec::with_capacity(2 * count);
    let mut last_modulus = 0.0;
    let mut last = Vec::new();
    for n in 0..count {
        let member = family.member(n);
        let p = &member[0];
        residue_polynomial(p.pole, p.coeffs.clone())?;
        let m = p.pole.location.norm();
        if m < last_modulus {
            return Err(ResidueError::Unordered(n));
        }
        last_modulus = m;
        if n + 1 == count {
            last = member.clone();
        }
        polys.extend(member);
    }
    let values = sum_terms(&polys, times);
    let tail_estimate = sum_terms(&last, times)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.norm()));
    let report = FamilyReport {
        count,
        tail_estimate,
        caveats: vec![
            "the vanishing of the contour integrals on the curves separating the poles is assumed, not checked".into(),
            "the limit of the series need not be differentiable; it is not possible to take t-derivatives term by term".into(),
        ],
    };
    Ok((GridFunction::new(times.to_vec(), values)?, report))
}
