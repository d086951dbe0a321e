//! Oracles and fixtures shared by the integration tests. Everything here is
//! independent of the library's numerics.
#![allow(dead_code)]

use nonlocal_core::expr::{parse_expr, parse_expr_in, GammaRegion, Symbol};
use nonlocal_core::ivp::IVPProblem;
use nonlocal_core::laplace::{ContourParams, ForcingTerm};
use nonlocal_core::residue::PoleSpec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn symbol(text: &str) -> Symbol {
    Symbol::new(parse_expr(text).unwrap(), GammaRegion::new(10.0, 0.0).unwrap())
}

pub fn forcing(text: &str) -> ForcingTerm {
    ForcingTerm::closed_form(parse_expr_in(text, "t").unwrap()).unwrap()
}

/// Monomial coefficients of `prod (s - r_i)`, lowest order first.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut p = vec![1.0];
    for r in roots {
        let mut next = vec![0.0; p.len() + 1];
        for (k, a) in p.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= r * a;
        }
        p = next;
    }
    p
}

/// `phi^(n)(0)` for `n <= n_max` of the ODE `sum_k p_k phi^(k) = J` from
/// the first `N` values, by differentiating the equation at 0.
pub fn ode_trace(p: &[f64], init: &[f64], j_derivs: &[f64], n_max: usize) -> Vec<f64> {
    let n = p.len() - 1;
    let mut d = init.to_vec();
    while d.len() <= n_max {
        let m = d.len() - n;
        let lower: f64 = (0..n).map(|k| p[k] * d[k + m]).sum();
        d.push((j_derivs[m] - lower) / p[n]);
    }
    d
}

/// Classical RK4 for `sum_k p_k phi^(k) = J(t)` as a first-order system.
/// Returns `phi` at each of `times` (which must be multiples of `h`).
pub fn rk4(p: &[f64], init: &[f64], j: impl Fn(f64) -> f64, h: f64, times: &[f64]) -> Vec<f64> {
    let n = p.len() - 1;
    let rhs = |t: f64, y: &[f64]| -> Vec<f64> {
        let mut dy: Vec<f64> = y[1..].to_vec();
        let lower: f64 = (0..n).map(|k| p[k] * y[k]).sum();
        dy.push((j(t) - lower) / p[n]);
        dy
    };
    let axpy = |y: &[f64], k: &[f64], a: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(u, v)| u + a * v).collect()
    };
    let mut y = init.to_vec();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let steps = ((target - t) / h).round() as usize;
        for _ in 0..steps {
            let k1 = rhs(t, &y);
            let k2 = rhs(t + h / 2.0, &axpy(&y, &k1, h / 2.0));
            let k3 = rhs(t + h / 2.0, &axpy(&y, &k2, h / 2.0));
            let k4 = rhs(t + h, &axpy(&y, &k3, h));
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += h;
        }
        t = target;
        out.push(y[0]);
    }
    out
}

/// `d^m/dt^m [t^2 e^-t]` at 0: `(-1)^m m (m - 1)`.
pub fn t2_exp_derivs(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * (m * m.saturating_sub(1)) as f64
        })
        .collect()
}

/// A polynomial-symbol IVP with simple real roots as poles.
pub struct Fixture {
    pub roots: Vec<f64>,
    pub poly: Vec<f64>,
    pub init: Vec<f64>,
    pub forced: bool,
    pub problem: IVPProblem,
}

impl Fixture {
    pub fn j(&self, t: f64) -> f64 {
        if self.forced {
            t * t * (-t).exp()
        } else {
            0.0
        }
    }

    pub fn j_derivs(&self, n: usize) -> Vec<f64> {
        if self.forced {
            t2_exp_derivs(n)
        } else {
            vec![0.0; n + 1]
        }
    }
}

fn fmt_root(r: f64) -> String {
    if r < 0.0 {
        format!("(s + {:?})", -r)
    } else {
        format!("(s - {r:?})")
    }
}

/// Twelve seeded fixtures: degree 1 to 3, roots in `[-2, 0.5]` at least
/// 0.4 apart, data in `[-1, 1]`, alternately unforced and `J = t^2 e^-t`.
pub fn polynomial_fixtures() -> Vec<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240917);
    (0..12)
        .map(|i| {
            let n = 1 + i % 3;
            let mut roots: Vec<f64> = Vec::new();
            while roots.len() < n {
                let r: f64 = rng.gen_range(-2.0..0.5);
                if roots.iter().all(|q| (q - r).abs() >= 0.4) {
                    roots.push(r);
                }
            }
            let init: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let forced = i % 2 == 1;
            let text = roots.iter().map(|r| fmt_root(*r)).collect::<Vec<_>>().join("*");
            let abscissa = roots.iter().cloned().fold(0.0, f64::max) + 1.0;
            let j = if forced {
                forcing("t^2*exp(-t)")
            } else {
                ForcingTerm::zero()
            };
            let problem = IVPProblem::new(
                symbol(&text),
                j,
                roots.iter().map(|r| PoleSpec::simple(c(*r, 0.0))).collect(),
                init.iter().map(|v| c(*v, 0.0)).collect(),
                ContourParams::default().with_abscissa(abscissa),
            )
            .unwrap();
            Fixture {
                poly: poly_from_roots(&roots),
                roots,
                init,
                forced,
                problem,
            }
        })
        .collect()
}
