use num_complex::Complex64;
use serde::Serialize;

use super::Transform;
use crate::diagnostics::Warning;

pub const DEFAULT_WIDDER_BOUND: f64 = 1e2;
pub const DEFAULT_WIDDER_ORDER: usize = 8;

/// Sampled Widder ratios. This is a heuristic: it looks at finitely many
/// orders and points and proves nothing about the supremum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidderReport {
    pub heuristic: bool,
    pub passed: bool,
    pub worst_ratio: f64,
    /// `(n, s)` where the worst ratio occurred.
    pub worst_at: Option<(usize, f64)>,
    pub bound: f64,
    pub warnings: Vec<Warning>,
}

impl WidderReport {
    pub fn warning(&self) -> Option<Warning> {
        (!self.passed).then(|| Warning::Widder {
            worst_ratio: self.worst_ratio,
            bound: self.bound,
        })
    }
}

/// 25 points with `s - omega` log-spaced over `[1e-3, 1e3]`.
pub fn default_s_grid(omega: f64) -> Vec<f64> {
    (0..25)
        .map(|j| omega + 10f64.powf(-3.0 + 6.0 * j as f64 / 24.0))
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `sup |(s - omega)^(n+1)/n! G^(n)(s)|` over `n <= n_max` and real `s` in
/// `s_grid`. Derivatives use an `n`-th central difference with step
/// `eta (s - omega)`. Points where `G` cannot be evaluated are reported as
/// warnings; a non-finite ratio fails the check.
pub fn widder_heuristic<G: Transform>(
    g: &G,
    omega: f64,
    n_max: usize,
    s_grid: &[f64],
    bound: f64,
) -> WidderReport {
    let eta = (0.2 / (n_max + 1) as f64).min(0.1);
    let mut worst = 0.0_f64;
    let mut worst_at = None;
    let mut finite = true;
    let mut failures = 0;
    for &s in s_grid.iter().filter(|s| **s > omega) {
        let x = s - omega;
        let delta = eta * x;
        let mut n_fact = 1.0;
        for n in 0..=n_max {
            if n > 0 {
                n_fact *= n as f64;
            }
            // sum_j (-1)^j C(n,j) G(s + (n/2 - j) delta) / delta^n
            let mut acc = Complex64::new(0.0, 0.0);
            let mut ok = true;
            for j in 0..=n {
                let p = Complex64::new(s + (n as f64 / 2.0 - j as f64) * delta, 0.0);
                match g(p) {
                    Ok(v) => {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        acc += v * (sign * binomial(n, j));
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                failures += 1;
                continue;
            }
            // (x/delta)^n x / n!, grouped to avoid overflow
            let ratio = acc.norm() * (x / delta).powi(n as i32) * x / n_fact;
            if !ratio.is_finite() {
                finite = false;
            }
            if ratio > worst || !ratio.is_finite() {
                worst = ratio;
                worst_at = Some((n, s));
            }
        }
    }
    let mut warnings = Vec::new();
    if failures > 0 {
        warnings.push(Warning::Sampling {
            message: format!("Widder heuristic skipped {failures} (order, point) pairs where G could not be evaluated"),
        });
    }
    WidderReport {
        heuristic: true,
        passed: finite && worst <= bound,
        worst_ratio: worst,
        worst_at,
        bound,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::EvalError;
    use crate::laplace::LaplaceError;

    fn run(g: impl Fn(Complex64) -> Complex64 + Sync, omega: f64) -> WidderReport {
        widder_heuristic(
            &|s| Ok::<_, LaplaceError>(g(s)),
            omega,
            DEFAULT_WIDDER_ORDER,
            &default_s_grid(omega),
            DEFAULT_WIDDER_BOUND,
        )
    }

    #[test]
    fn simple_pole_has_unit_ratio() {
        let r = run(|s| (s - 0.5).inv(), 0.5);
        assert!(r.passed);
        assert!((r.worst_ratio - 1.0).abs() < 0.05, "{}", r.worst_ratio);
    }

    #[test]
    fn ramp_fails_on_the_imaginary_axis_but_not_beyond() {
        let r = run(|s| s.powi(-2), 0.0);
        assert!(!r.passed);
        assert!(r.worst_ratio > 1e3);
        let r = run(|s| s.powi(-2), 1.0);
        assert!(r.passed, "{}", r.worst_ratio);
    }

    #[test]
    fn evaluation_failures_become_warnings() {
        let r = widder_heuristic(
            &|s: Complex64| {
                if s.re > 10.0 {
                    Err(EvalError::Overflow("exp").into())
                } else {
                    Ok(s.inv())
                }
            },
            0.0,
            2,
            &default_s_grid(0.0),
            1e2,
        );
        assert_eq!(r.warnings.len(), 1);
    }
}
