use serde::{Deserialize, Serialize};

use super::LaplaceError;

/// The truncated Bromwich line `Re(s) = abscissa`, `|Im(s)| <= half_height`,
/// sampled every `step`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourParams {
    pub abscissa: f64,
    pub half_height: f64,
    pub step: f64,
    /// Subtract a fitted algebraic tail before summing (see `bromwich`).
    pub tail_correction: bool,
    /// Allowed change under the `(2T, h/2)` refinement, relative to
    /// `max(1, max |phi|)`.
    pub tolerance: f64,
}

impl Default for ContourParams {
    fn default() -> Self {
        ContourParams {
            abscissa: 1.0,
            half_height: 200.0,
            step: 0.05,
            tail_correction: true,
            tolerance: 1e-6,
        }
    }
}

impl ContourParams {
    pub fn new(abscissa: f64, half_height: f64, step: f64) -> Result<Self, LaplaceError> {
        ContourParams {
            abscissa,
            half_height,
            step,
            ..Default::default()
        }
        .validated()
    }

    pub fn with_abscissa(self, abscissa: f64) -> Self {
        ContourParams { abscissa, ..self }
    }

    pub fn validated(self) -> Result<Self, LaplaceError> {
        let ok = self.abscissa.is_finite()
            && self.half_height.is_finite()
            && self.step > 0.0
            && self.step < self.half_height
            && self.tolerance > 0.0
            && (self.half_height / self.step) < 1e8;
        if ok {
            Ok(self)
        } else {
            Err(LaplaceError::InvalidContour(self))
        }
    }

    /// `K = ceil(T/h)`; nodes run over `k = -K..=K`.
    pub fn half_count(&self) -> usize {
        (self.half_height / self.step).ceil() as usize
    }

    pub fn node_count(&self) -> usize {
        2 * self.half_count() + 1
    }

    /// The contour used for the self-check: twice as tall, half the step.
    pub fn refined(&self) -> Self {
        ContourParams {
            half_height: 2.0 * self.half_height,
            step: 0.5 * self.step,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ContourParams::default();
        assert_eq!(c.node_count(), 8001);
        assert_eq!(c.refined().node_count(), 32001);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(ContourParams::new(1.0, 1.0, 2.0).is_err());
        assert!(ContourParams::new(1.0, 10.0, 0.0).is_err());
        assert!(ContourParams::new(f64::NAN, 10.0, 0.1).is_err());
        assert!(ContourParams::new(0.5, 10.0, 0.1).is_ok());
    }
}
