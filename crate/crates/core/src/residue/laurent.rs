use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{PoleSpec, ResidueError};
use crate::expr::AnalyticExpr;
use crate::laplace::Transform;

/// Trapezoid nodes on the Laurent circle.
pub const LAURENT_NODES: usize = 256;
const RESIDUAL_TOL: f64 = 1e-8;

/// `min(0.5 * distance to the nearest other pole, 0.5 * distance to the
/// line Re(s) = abscissa)`.
pub fn default_radius(pole: &PoleSpec, others: &[PoleSpec], abscissa: f64) -> f64 {
    let to_line = 0.5 * (abscissa - pole.location.re);
    others
        .iter()
        .filter(|q| q.location != pole.location)
        .map(|q| 0.5 * (q.location - pole.location).norm())
        .fold(to_line, f64::min)
}

/// Principal-part coefficients `a_1..a_r` of `g` at `pole`:
/// `a_k = (1/2 pi i) int (s - w)^(k-1) g(s) ds` on `|s - w| = radius`.
///
/// The next two moments `a_(r+1), a_(r+2)` should vanish for a pole of
/// order `r`; if either exceeds `1e-8` of the circle maximum (after scaling
/// by `radius^k`) the expansion is reported as ill-conditioned.
pub fn laurent_coeffs_of<G: Transform>(
    g: &G,
    pole: &PoleSpec,
    radius: f64,
) -> Result<Vec<Complex64>, ResidueError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(ResidueError::BadRadius(radius));
    }
    let n = LAURENT_NODES;
    let w = pole.location;
    let samples: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let s = w + Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
            g(s).map_err(|source| ResidueError::Eval { s, source })
        })
        .collect::<Result<_, _>>()?;
    let scale = samples.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    // moment k: (1/N) sum_j rho^k e^(ik theta_j) g_j
    let moment = |k: usize| -> Complex64 {
        let sum: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let theta = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                v * Complex64::from_polar(1.0, theta)
            })
            .sum();
        sum * (radius.powi(k as i32) / n as f64)
    };
    let coeffs: Vec<Complex64> = (1..=pole.order).map(moment).collect();
    for k in pole.order + 1..=pole.order + 2 {
        let size = moment(k).norm() / radius.powi(k as i32);
        if size > RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(ResidueError::IllConditioned {
                pole: w,
                k,
                size: size / scale,
            });
        }
    }
    Ok(coeffs)
}

/// Laurent coefficients of `r/f` at `pole`.
pub fn laurent_coeffs(
    r: &AnalyticExpr,
    f: &AnalyticExpr,
    pole: &PoleSpec,
    radius: f64,
) -> Result<Vec<Complex64>, ResidueError> {
    laurent_coeffs_of(&|s| Ok(r.eval(s)? / f.eval(s)?), pole, radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn double_pole_at_origin() {
        let r = parse_expr("p1 + p0*s").unwrap().with_params([("p0", 2.0), ("p1", -3.0)]);
        let f = parse_expr("s^2").unwrap();
        let a = laurent_coeffs(&r, &f, &PoleSpec::new(c(0.0, 0.0), 2).unwrap(), 0.5).unwrap();
        assert!((a[0] - c(2.0, 0.0)).norm() < 1e-13);
        assert!((a[1] - c(-3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn simple_pole_residue() {
        let a = laurent_coeffs(
            &parse_expr("1").unwrap(),
            &parse_expr("s^2 + 1").unwrap(),
            &PoleSpec::simple(c(0.0, 1.0)),
            0.5,
        )
        .unwrap();
        assert!((a[0] - c(0.0, 2.0).inv()).norm() < 1e-13);
    }

    #[test]
    fn triple_pole() {
        let a = laurent_coeffs(
            &parse_expr("1").unwrap(),
            &parse_expr("(s - 1)^3").unwrap(),
            &PoleSpec::new(c(1.0, 0.0), 3).unwrap(),
            0.3,
        )
        .unwrap();
        assert!(a[0].norm() < 1e-13 && a[1].norm() < 1e-13);
        assert!((a[2] - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn underdeclared_order_is_ill_conditioned() {
        let err = laurent_coeffs(
            &parse_expr("1").unwrap(),
            &parse_expr("s^2").unwrap(),
            &PoleSpec::simple(c(0.0, 0.0)),
            0.5,
        )
        .unwrap_err();
        assert!(matches!(err, ResidueError::IllConditioned { k: 2, .. }));
    }

    #[test]
    fn radius_rule() {
        let p = PoleSpec::simple(c(0.0, 1.0));
        let q = PoleSpec::simple(c(0.0, -1.0));
        assert_eq!(default_radius(&p, &[p, q], 3.0), 1.0);
        assert_eq!(default_radius(&p, &[p, q], 1.0), 0.5);
    }
}
