use num_complex::Complex64;
use serde::Serialize;

use super::{IvpError, Tolerances};
use crate::diagnostics::Warning;
use crate::expr::{add, cnst, diff_expr, mul, pow, sub, AnalyticExpr, Node};
use crate::residue::{laurent_coeffs_of, ResiduePolynomial};
use std::sync::Arc;

const IDENTITY_SAMPLES: usize = 20;

/// The generalized initial condition reproducing a set of residue parts.
#[derive(Clone, Debug, Serialize)]
pub struct R0 {
    #[serde(serialize_with = "serialize_expr")]
    pub expr: AnalyticExpr,
    /// Relative gap between `L^-1(r0/f)` (through its Laurent data) and the
    /// residue sum on 20 times in `[0, 1]`.
    pub identity_error: f64,
    pub warnings: Vec<Warning>,
}

fn serialize_expr<S: serde::Serializer>(e: &AnalyticExpr, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(e)
}

/// `sum_i sum_k a_{k,i} (s - w_i)^(-k)` as an expression tree.
fn principal_parts(parts: &[ResiduePolynomial]) -> Arc<Node> {
    let var = Arc::new(Node::Var);
    let mut acc = cnst(Complex64::new(0.0, 0.0));
    for p in parts {
        let base = sub(var.clone(), cnst(p.pole.location));
        for (k, a) in p.coeffs.iter().enumerate() {
            if *a != Complex64::new(0.0, 0.0) {
                acc = add(acc, mul(cnst(*a), pow(base.clone(), -(k as i32 + 1))));
            }
        }
    }
    acc
}

/// `r0(s) = f(s) sum_i sum_k a_{k,i}/(s - w_i)^k`, so that
/// `L^-1(r0/f) = sum_i P_i(t) e^(w_i t)`.
///
/// The identity is checked numerically by recovering the Laurent data of
/// `r0/f` on small circles. A pole where `f` does not vanish to the pole
/// order leaves `r0` with a pole there; that is reported, not rejected.
pub fn construct_r0(
    f: &AnalyticExpr,
    parts: &[ResiduePolynomial],
    tol: &Tolerances,
) -> Result<R0, IvpError> {
    let expr = f.with_root(mul(f.root().clone(), principal_parts(parts)));
    let mut warnings = Vec::new();
    for p in parts {
        let mut worst = 0.0_f64;
        for j in 0..p.pole.order {
            worst = worst.max(diff_expr(f, j).eval(p.pole.location)?.norm());
        }
        if worst > tol.non_entire {
            warnings.push(Warning::NonEntire {
                pole: p.pole.location,
                order: p.pole.order,
                value: worst,
            });
        }
    }
    let identity_error = match identity_gap(&expr, f, parts) {
        Ok(e) => e,
        Err(e) => {
            warnings.push(Warning::Sampling {
                message: format!("r0 identity check failed to run: {e}"),
            });
            f64::INFINITY
        }
    };
    if !(identity_error <= tol.identity) {
        warnings.push(Warning::Sampling {
            message: format!("L^-1(r0/f) differs from the residue sum by {identity_error:e}"),
        });
    }
    Ok(R0 {
        expr,
        identity_error,
        warnings,
    })
}

fn identity_gap(
    r0: &AnalyticExpr,
    f: &AnalyticExpr,
    parts: &[ResiduePolynomial],
) -> Result<f64, IvpError> {
    let g = |s: Complex64| Ok(r0.eval(s)? / f.eval(s)?);
    let mut rebuilt = Vec::with_capacity(parts.len());
    for p in parts {
        let radius = parts
            .iter()
            .filter(|q| q.pole.location != p.pole.location)
            .map(|q| 0.5 * (q.pole.location - p.pole.location).norm())
            .fold(0.5, f64::min);
        let coeffs = laurent_coeffs_of(&g, &p.pole, radius)?;
        rebuilt.push(ResiduePolynomial {
            pole: p.pole,
            coeffs,
        });
    }
    let mut scale = 1.0_f64;
    let mut gap = 0.0_f64;
    for i in 0..IDENTITY_SAMPLES {
        let t = i as f64 / (IDENTITY_SAMPLES - 1) as f64;
        let want: Complex64 = parts.iter().map(|p| p.term(t)).sum();
        let got: Complex64 = rebuilt.iter().map(|p| p.term(t)).sum();
        scale = scale.max(want.norm());
        gap = gap.max((got - want).norm());
    }
    Ok(gap / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::residue::{residue_polynomial, PoleSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close_on_samples(a: &AnalyticExpr, b: impl Fn(Complex64) -> Complex64) {
        for z in [c(0.3, 0.7), c(-1.2, 0.1), c(2.0, -3.0)] {
            let got = a.eval(z).unwrap();
            assert!((got - b(z)).norm() < 1e-12 * (1.0 + got.norm()), "{z}: {got}");
        }
    }

    #[test]
    fn double_pole_at_origin() {
        let p = residue_polynomial(PoleSpec::new(c(0.0, 0.0), 2).unwrap(), vec![c(2.0, 0.0), c(-5.0, 0.0)])
            .unwrap();
        let r0 = construct_r0(&parse_expr("s^2").unwrap(), &[p], &Tolerances::default()).unwrap();
        close_on_samples(&r0.expr, |s| 2.0 * s - 5.0);
        assert!(r0.warnings.is_empty(), "{:?}", r0.warnings);
        assert!(r0.identity_error < 1e-12);
    }

    #[test]
    fn simple_pole_constant() {
        let lambda = c(-0.7, 0.0);
        let f = parse_expr("s - l").unwrap().with_param("l", lambda.re);
        let p = residue_polynomial(PoleSpec::simple(lambda), vec![c(3.0, 0.0)]).unwrap();
        let r0 = construct_r0(&f, &[p], &Tolerances::default()).unwrap();
        close_on_samples(&r0.expr, |_| c(3.0, 0.0));
    }

    #[test]
    fn harmonic_pair() {
        let parts = [
            residue_polynomial(PoleSpec::simple(c(0.0, 1.0)), vec![c(0.5, 0.0)]).unwrap(),
            residue_polynomial(PoleSpec::simple(c(0.0, -1.0)), vec![c(0.5, 0.0)]).unwrap(),
        ];
        let r0 = construct_r0(&parse_expr("s^2 + 1").unwrap(), &parts, &Tolerances::default()).unwrap();
        close_on_samples(&r0.expr, |s| s);
        assert!(r0.identity_error < 1e-10);
    }

    #[test]
    fn non_entire_warning() {
        let p = residue_polynomial(PoleSpec::simple(c(0.0, 0.0)), vec![c(1.0, 0.0)]).unwrap();
        let r0 = construct_r0(&parse_expr("s + 2").unwrap(), &[p], &Tolerances::default()).unwrap();
        assert!(matches!(r0.warnings[0], Warning::NonEntire { .. }));
        assert!(r0.identity_error < 1e-10);
    }
}
