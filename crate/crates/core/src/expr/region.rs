use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::AnalyticExpr;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("disk radius R_f must be positive and finite, got {0}")]
    Radius(f64),
    #[error("half-plane abscissa {omega} must be finite and below the disk radius {radius}")]
    Abscissa { omega: f64, radius: f64 },
}

/// Declared analyticity region: the disk `|s| < radius` together with the
/// half-plane `Re(s) > abscissa`. Membership is a user hypothesis; only
/// sampled evaluability is checked.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaRegion {
    radius: f64,
    abscissa: f64,
}

impl GammaRegion {
    pub fn new(radius: f64, abscissa: f64) -> Result<Self, RegionError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(RegionError::Radius(radius));
        }
        if !(abscissa.is_finite() && abscissa < radius) {
            return Err(RegionError::Abscissa {
                omega: abscissa,
                radius,
            });
        }
        Ok(GammaRegion { radius, abscissa })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    /// Samples `f` on `|s| = 0.9 R_f` and on `Re(s) = abscissa + eps` and
    /// returns one message per failed sample set.
    pub fn spot_check(&self, f: &AnalyticExpr) -> Vec<String> {
        const SAMPLES: usize = 32;
        let mut warnings = Vec::new();
        let rho = 0.9 * self.radius;
        let bad_circle = (0..SAMPLES)
            .map(|j| Complex64::from_polar(rho, 2.0 * PI * j as f64 / SAMPLES as f64))
            .filter(|z| f.eval(*z).is_err())
            .count();
        if bad_circle > 0 {
            warnings.push(format!(
                "symbol not evaluable at {bad_circle}/{SAMPLES} points of |s| = {rho}"
            ));
        }
        let eps = 1e-3 * self.abscissa.abs().max(1.0);
        let bad_line = (0..SAMPLES)
            .map(|j| {
                let y = -20.0 + 40.0 * j as f64 / (SAMPLES - 1) as f64;
                Complex64::new(self.abscissa + eps, y)
            })
            .filter(|z| f.eval(*z).is_err())
            .count();
        if bad_line > 0 {
            warnings.push(format!(
                "symbol not evaluable at {bad_line}/{SAMPLES} points of Re(s) = {}",
                self.abscissa + eps
            ));
        }
        warnings
    }
}

/// The symbol `f` of an equation `f(d/dt) phi = J` with its declared region.
#[derive(Clone, Debug)]
pub struct Symbol {
    pub expr: AnalyticExpr,
    pub region: GammaRegion,
}

impl Symbol {
    pub fn new(expr: AnalyticExpr, region: GammaRegion) -> Self {
        Symbol { expr, region }
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64, super::EvalError> {
        self.expr.eval(s)
    }

    /// Default circle for Taylor quadrature: `min(0.9 R_f, 2)`.
    pub fn taylor_radius(&self) -> f64 {
        (0.9 * self.region.radius).min(2.0)
    }
}
