use num_complex::Complex64;
use serde::Serialize;

use super::{ContourParams, LaplaceError, Transform};
use crate::diagnostics::Warning;

const SAMPLES: usize = 32;

/// Algebraic decay of `G` along the contour: `|G(c + iy)| ~ |y|^-p_hat`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayEstimate {
    /// Infinite when `G` vanishes at every sample.
    pub p_hat: f64,
}

impl DecayEstimate {
    /// Number of classical derivatives certified at `t = 0`,
    /// `max(0, floor(p_hat) - 1)`. The estimate sits slightly below integer
    /// decay rates at finite `T`, so values within 0.1 below an integer are
    /// snapped up first.
    pub fn certified(&self) -> usize {
        if self.p_hat.is_infinite() {
            return usize::MAX;
        }
        ((self.p_hat + 0.1).floor() - 1.0).max(0.0) as usize
    }

    pub fn warning(&self) -> Option<Warning> {
        (self.p_hat < 0.9).then_some(Warning::NoSmoothing { p_hat: self.p_hat })
    }
}

/// Least-squares slope of `log|G(c + iy)|` against `log|y|` over
/// `|y| in [T, 10T]`, both signs, `p_hat = -slope`.
pub fn estimate_decay<G: Transform>(
    g: &G,
    contour: &ContourParams,
) -> Result<DecayEstimate, LaplaceError> {
    let contour = contour.validated()?;
    let t = contour.half_height;
    let mut xs = Vec::with_capacity(2 * SAMPLES);
    let mut ys = Vec::with_capacity(2 * SAMPLES);
    for j in 0..SAMPLES {
        let y = t * 10f64.powf(j as f64 / (SAMPLES - 1) as f64);
        for sign in [1.0, -1.0] {
            let s = Complex64::new(contour.abscissa, sign * y);
            let v = g(s).map_err(|source| LaplaceError::Transform {
                s,
                source: Box::new(source),
            })?;
            if v.norm() > 0.0 {
                xs.push(y.ln());
                ys.push(v.norm().ln());
            }
        }
    }
    if xs.len() < 2 {
        return Ok(DecayEstimate {
            p_hat: f64::INFINITY,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(DecayEstimate { p_hat: -sxy / sxx })
}
