use num_complex::Complex64;
use serde::Serialize;

use super::IvpError;
use crate::expr::{AnalyticExpr, EvalError};
use crate::laplace::{
    estimate_decay, laplace_forward, ContourParams, DecayEstimate, ForcingTerm, LaplaceError,
    LineSamples, Refinement, Transform,
};

/// `s -> (L(J)(s) + r(s)) / f(s)`, with `r = 0` when absent.
pub fn forcing_transform<'a>(
    f: &'a AnalyticExpr,
    j: &'a ForcingTerm,
    r: Option<&'a AnalyticExpr>,
) -> impl Transform + 'a {
    move |s: Complex64| -> Result<Complex64, LaplaceError> {
        let mut num = if j.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            laplace_forward(j, s)?
        };
        if let Some(r) = r {
            num += r.eval(s)?;
        }
        let den = f.eval(s)?;
        if den == Complex64::new(0.0, 0.0) {
            return Err(EvalError::DivisionByZero.into());
        }
        Ok(num / den)
    }
}

/// `L_n = phi_B^(n)(0+)` for the Bromwich component `phi_B = L^-1(L(J)/f)`.
#[derive(Clone, Debug, Serialize)]
pub struct LnValues {
    #[serde(serialize_with = "crate::cjson::many")]
    pub values: Vec<Complex64>,
    pub decay: DecayEstimate,
    pub refinement: Option<Refinement>,
}

/// `phi^(n)(0+)` of `L^-1(G)` for `n = 0..=n_max`: the corrected Bromwich
/// sum of `s^n G(s)` at `t = 0`, on the contour and its refinement.
pub(crate) fn line_derivatives(
    coarse: &LineSamples,
    fine: &LineSamples,
    n_max: usize,
) -> (Vec<Complex64>, Refinement) {
    let at_zero = |samples: &LineSamples, n: usize| -> Complex64 {
        samples.map(|s, v| s.powu(n as u32) * v).invert(&[0.0]).0[0]
    };
    let coarse_values: Vec<Complex64> = (0..=n_max).map(|n| at_zero(coarse, n)).collect();
    let fine_values: Vec<Complex64> = (0..=n_max).map(|n| at_zero(fine, n)).collect();
    let refinement = Refinement::compare(&coarse_values, &fine_values, coarse.contour().tolerance);
    (coarse_values, refinement)
}

/// The values `L_0..L_{n_max}`. Requires `n_max <= M` where
/// `M = estimate_decay(L(J)/f).certified()`; beyond that the moment
/// integrals are not absolutely convergent.
pub fn compute_ln(
    f: &AnalyticExpr,
    j: &ForcingTerm,
    contour: &ContourParams,
    n_max: usize,
) -> Result<LnValues, IvpError> {
    if j.is_zero() {
        return Ok(LnValues {
            values: vec![Complex64::new(0.0, 0.0); n_max + 1],
            decay: DecayEstimate {
                p_hat: f64::INFINITY,
            },
            refinement: None,
        });
    }
    let g = forcing_transform(f, j, None);
    let decay = estimate_decay(&g, contour)?;
    if n_max > decay.certified() {
        return Err(IvpError::InsufficientDecay {
            n: n_max,
            p_hat: decay.p_hat,
        });
    }
    let coarse = LineSamples::new(&g, contour)?;
    let fine = LineSamples::new(&g, &contour.refined())?;
    let (values, refinement) = line_derivatives(&coarse, &fine, n_max);
    Ok(LnValues {
        values,
        decay,
        refinement: Some(refinement),
    })
}
