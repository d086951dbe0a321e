//! Trapezoid-rule Bromwich inversion on a vertical line.
//!
//! The sum `(h/2pi) sum_k w_k e^(s_k t) G(s_k)` over `s_k = c + ikh`,
//! `|k| <= K`, converges only like `1/T` for transforms with algebraic
//! tails. Before summing we therefore fit
//! `G(s) ~ sum_{m=1..6} beta_m (T/(s - sigma))^m` on the outer part of the
//! line, subtract the fit at the nodes and add back its exact inverse
//! `sum beta_m T^m t^(m-1) e^(sigma t)/(m-1)!`. The subtracted remainder
//! decays like `|s|^-7`. The fit is linear in `G`, and a conjugate-symmetric
//! `G` gives real coefficients. When the fit is poor (oscillating tails such
//! as `1/(1+e^s)`) it is dropped and the plain trapezoid sum is used; that
//! accept/reject gate is the only nonlinear step.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_times, ContourParams, GridFunction, LaplaceError, Transform};
use crate::diagnostics::Warning;

const TAIL_TERMS: usize = 6;
const FIT_POINTS: usize = 32;
const MAX_MISFIT: f64 = 1e-3;

/// Fitted algebraic tail `sum beta_m (T/(s - sigma))^m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailModel {
    pub sigma: f64,
    pub scale: f64,
    #[serde(serialize_with = "crate::cjson::many")]
    pub coeffs: Vec<Complex64>,
    /// Relative least-squares residual on the fit samples.
    pub misfit: f64,
}

impl TailModel {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let u = self.scale / (s - self.sigma);
        let mut p = u;
        let mut acc = Complex64::new(0.0, 0.0);
        for b in &self.coeffs {
            acc += b * p;
            p *= u;
        }
        acc
    }

    /// Exact inverse transform of the model at `t >= 0` (right limit at 0).
    pub fn inverse(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        // T^m t^(m-1)/(m-1)!
        let mut w = self.scale;
        for (m, b) in self.coeffs.iter().enumerate() {
            if m > 0 {
                w *= self.scale * t / m as f64;
            }
            acc += b * w;
        }
        acc * (self.sigma * t).exp()
    }
}

/// Transform values on the trapezoid nodes plus the outer fit samples.
#[derive(Clone, Debug)]
pub struct LineSamples {
    contour: ContourParams,
    nodes: Vec<Complex64>,
    values: Vec<Complex64>,
    fit_nodes: Vec<Complex64>,
    fit_values: Vec<Complex64>,
}

impl LineSamples {
    pub fn new<G: Transform>(g: &G, contour: &ContourParams) -> Result<Self, LaplaceError> {
        let contour = contour.validated()?;
        let k = contour.half_count() as i64;
        let nodes: Vec<Complex64> = (-k..=k)
            .map(|j| Complex64::new(contour.abscissa, j as f64 * contour.step))
            .collect();
        let values = eval_all(g, &nodes)?;
        let t = contour.half_height;
        let fit_nodes: Vec<Complex64> = (0..FIT_POINTS)
            .map(|j| 0.5 * t + 0.5 * t * j as f64 / (FIT_POINTS - 1) as f64)
            .flat_map(|y| {
                [
                    Complex64::new(contour.abscissa, y),
                    Complex64::new(contour.abscissa, -y),
                ]
            })
            .collect();
        let fit_values = eval_all(g, &fit_nodes)?;
        Ok(LineSamples {
            contour,
            nodes,
            values,
            fit_nodes,
            fit_values,
        })
    }

    pub fn contour(&self) -> &ContourParams {
        &self.contour
    }

    /// Samples of `s -> f(s, G(s))`, reusing the stored values of `G`.
    pub fn map<F>(&self, f: F) -> LineSamples
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync,
    {
        let apply = |nodes: &[Complex64], values: &[Complex64]| -> Vec<Complex64> {
            nodes.iter().zip(values).map(|(s, v)| f(*s, *v)).collect()
        };
        LineSamples {
            contour: self.contour,
            nodes: self.nodes.clone(),
            values: apply(&self.nodes, &self.values),
            fit_nodes: self.fit_nodes.clone(),
            fit_values: apply(&self.fit_nodes, &self.fit_values),
        }
    }

    /// Least-squares tail model, or `None` when the fit is poor or the
    /// correction is switched off.
    pub fn tail_model(&self) -> Option<TailModel> {
        if !self.contour.tail_correction {
            return None;
        }
        let norm_b = self.fit_values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm_b == 0.0 {
            return None;
        }
        let sigma = self.contour.abscissa - 1.0;
        let scale = self.contour.half_height;
        let rows = self.fit_nodes.len();
        let a = DMatrix::from_fn(rows, TAIL_TERMS, |i, m| {
            (scale / (self.fit_nodes[i] - sigma)).powu(m as u32 + 1)
        });
        let b = DVector::from_column_slice(&self.fit_values);
        let beta = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
        let misfit = (&a * &beta - &b).norm() / norm_b;
        if !(misfit < MAX_MISFIT) {
            return None;
        }
        Some(TailModel {
            sigma,
            scale,
            coeffs: beta.iter().copied().collect(),
            misfit,
        })
    }

    /// Corrected trapezoid sum at each time, evaluated in parallel over
    /// times; each sum runs in node order so results are reproducible.
    pub fn invert(&self, times: &[f64]) -> (Vec<Complex64>, Option<TailModel>) {
        let model = self.tail_model();
        let corrected: Vec<Complex64> = match &model {
            Some(m) => self
                .nodes
                .iter()
                .zip(&self.values)
                .map(|(s, v)| v - m.eval(*s))
                .collect(),
            None => self.values.clone(),
        };
        let h = self.contour.step;
        let c = self.contour.abscissa;
        let last = self.nodes.len() - 1;
        let out = times
            .par_iter()
            .map(|&t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, (s, v)) in self.nodes.iter().zip(&corrected).enumerate() {
                    let term = Complex64::from_polar(1.0, s.im * t) * v;
                    acc += if k == 0 || k == last { 0.5 * term } else { term };
                }
                let mut phi = acc * ((c * t).exp() * h / (2.0 * PI));
                if let Some(m) = &model {
                    phi += m.inverse(t);
                }
                phi
            })
            .collect();
        (out, model)
    }
}

fn eval_all<G: Transform>(g: &G, nodes: &[Complex64]) -> Result<Vec<Complex64>, LaplaceError> {
    nodes
        .par_iter()
        .map(|s| g(*s).map_err(|source| LaplaceError::Transform {
            s: *s,
            source: Box::new(source),
        }))
        .collect()
}

/// Outcome of the `(2T, h/2)` self-check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refinement {
    pub max_change: f64,
    pub tolerance: f64,
    pub converged: bool,
}

impl Refinement {
    pub fn compare(coarse: &[Complex64], fine: &[Complex64], tolerance: f64) -> Self {
        let scale = coarse.iter().fold(1.0_f64, |m, v| m.max(v.norm()));
        let max_change = coarse
            .iter()
            .zip(fine)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        Refinement {
            max_change,
            tolerance,
            converged: max_change <= tolerance * scale,
        }
    }

    pub fn warning(&self) -> Option<Warning> {
        (!self.converged).then(|| Warning::Convergence {
            max_change: self.max_change,
            tolerance: self.tolerance,
        })
    }
}

/// Result of [`bromwich_invert`].
#[derive(Clone, Debug, Serialize)]
pub struct Inversion {
    pub solution: GridFunction,
    /// Largest `|Im phi|`; small for real problems.
    pub max_imag: f64,
    pub tail: Option<TailModel>,
    pub refinement: Refinement,
    pub warnings: Vec<Warning>,
}

impl Inversion {
    /// Turns a failed self-check into an error for strict callers.
    pub fn ensure_converged(self) -> Result<Self, LaplaceError> {
        if self.refinement.converged {
            Ok(self)
        } else {
            Err(LaplaceError::NotConverged {
                max_change: self.refinement.max_change,
                tolerance: self.refinement.tolerance,
            })
        }
    }
}

/// Plain corrected trapezoid sum without the self-check.
pub fn bromwich_sum<G: Transform>(
    g: &G,
    contour: &ContourParams,
    times: &[f64],
) -> Result<Vec<Complex64>, LaplaceError> {
    check_times(times)?;
    Ok(LineSamples::new(g, contour)?.invert(times).0)
}

/// `phi(t) = (1/2 pi i) int e^(st) G(s) ds` on the truncated line, with the
/// result compared against the refined contour `(2T, h/2)`.
pub fn bromwich_invert<G: Transform>(
    g: &G,
    contour: &ContourParams,
    times: &[f64],
) -> Result<Inversion, LaplaceError> {
    check_times(times)?;
    let coarse = LineSamples::new(g, contour)?;
    let fine = LineSamples::new(g, &contour.refined())?;
    invert_sampled(&coarse, &fine, times)
}

/// [`bromwich_invert`] on samples already taken on a contour and on its
/// refinement.
pub fn invert_sampled(
    coarse: &LineSamples,
    fine: &LineSamples,
    times: &[f64],
) -> Result<Inversion, LaplaceError> {
    check_times(times)?;
    let (values, tail) = coarse.invert(times);
    let (refined, _) = fine.invert(times);
    let refinement = Refinement::compare(&values, &refined, coarse.contour.tolerance);
    let solution = GridFunction::new(times.to_vec(), values)?;
    Ok(Inversion {
        max_imag: solution.max_imag(),
        warnings: refinement.warning().into_iter().collect(),
        solution,
        tail,
        refinement,
    })
}

#[cfg(test)]
mod tests {
    use super::super::uniform_times;
    use super::*;
    use crate::expr::EvalError;
    use crate::laplace::LaplaceError;

    fn max_err(got: &[Complex64], want: impl Fn(f64) -> f64, times: &[f64]) -> f64 {
        got.iter()
            .zip(times)
            .fold(0.0, |m, (g, t)| m.max((g.re - want(*t)).abs()))
    }

    #[test]
    fn ramp_sine_and_step() {
        let times = uniform_times(0.1, 5.0, 50);
        let c = ContourParams::default();
        let ramp = bromwich_sum(&|s: Complex64| Ok::<_, LaplaceError>(s.powi(-2)), &c, &times).unwrap();
        assert!(max_err(&ramp, |t| t, &times) < 1e-8);
        let sine =
            bromwich_sum(&|s: Complex64| Ok((s * s + 1.0).inv()), &c, &times).unwrap();
        assert!(max_err(&sine, f64::sin, &times) < 1e-8);
    }

    #[test]
    fn correction_beats_plain_trapezoid() {
        let times = uniform_times(0.1, 5.0, 50);
        let g = |s: Complex64| Ok((s * (s + 1.0)).inv());
        let want = |t: f64| 1.0 - (-t).exp();
        let on = ContourParams::default();
        let off = ContourParams {
            tail_correction: false,
            ..on
        };
        let e_on = max_err(&bromwich_sum(&g, &on, &times).unwrap(), want, &times);
        let e_off = max_err(&bromwich_sum(&g, &off, &times).unwrap(), want, &times);
        assert!(e_on < 1e-8, "{e_on}");
        assert!(e_off > 1e-5 && e_off < 1e-3, "{e_off}");
    }

    #[test]
    fn right_limit_at_zero() {
        // 1/s has a jump at 0; the model carries it
        let v = bromwich_sum(&|s: Complex64| Ok(s.inv()), &ContourParams::default(), &[0.0])
            .unwrap();
        assert!((v[0].re - 1.0).abs() < 1e-9, "{}", v[0]);
    }

    #[test]
    fn negative_time_rejected() {
        let err = bromwich_invert(
            &|s: Complex64| Ok(s.inv()),
            &ContourParams::default(),
            &[-1.0, 0.5],
        )
        .unwrap_err();
        assert!(matches!(err, LaplaceError::BadGrid(_)));
    }

    #[test]
    fn eval_errors_carry_the_node() {
        let err = bromwich_sum(
            &|s: Complex64| {
                if s.im == 0.0 {
                    Err(EvalError::DivisionByZero.into())
                } else {
                    Ok(s)
                }
            },
            &ContourParams::default(),
            &[1.0],
        )
        .unwrap_err();
        assert!(matches!(err, LaplaceError::Transform { .. }));
    }

    #[test]
    fn self_check_reports() {
        let inv = bromwich_invert(
            &|s: Complex64| Ok(s.powi(-2)),
            &ContourParams::default(),
            &uniform_times(0.0, 3.0, 7),
        )
        .unwrap();
        assert!(inv.refinement.converged);
        assert!(inv.warnings.is_empty());
        assert!(inv.tail.is_some());
        assert!(inv.max_imag < 1e-10);
    }

    #[test]
    fn oscillating_tail_disables_the_model() {
        let s = LineSamples::new(
            &|s: Complex64| Ok((s * (1.0 + s.exp())).inv()),
            &ContourParams::default().with_abscissa(0.3),
        )
        .unwrap();
        assert!(s.tail_model().is_none());
    }
}
