mod common;

use common::*;
use nonlocal_core::ivp::{derivative_trace, solve_classical_ivp};
use nonlocal_core::laplace::uniform_times;

#[test]
fn polynomial_fixtures_match_ode_oracles() {
    let times = uniform_times(0.0, 2.0, 21);
    for (i, fx) in polynomial_fixtures().iter().enumerate() {
        let k = fx.roots.len();
        let start = std::time::Instant::now();
        let sol = solve_classical_ivp(&fx.problem, &times).unwrap();
        let trace = derivative_trace(&sol, &fx.problem, k + 2).unwrap();
        let want = ode_trace(&fx.poly, &fx.init, &fx.j_derivs(k + 2), k + 2);
        for n in 0..k {
            assert_eq!(trace[n].re, fx.init[n]);
            assert_eq!(trace[n].im, 0.0);
        }
        for n in k..=k + 2 {
            assert!(
                (trace[n].re - want[n]).abs() < 1e-5 && trace[n].im.abs() < 1e-8,
                "fixture {i}, n = {n}: {} vs {}",
                trace[n],
                want[n]
            );
        }
        let rk = rk4(&fx.poly, &fx.init, |t| fx.j(t), 1e-4, &times);
        let total = sol.total();
        for ((t, v), w) in total.iter().zip(rk) {
            assert!((v.re - w).abs() < 1e-6, "fixture {i}, t = {t}: {v} vs {w}");
        }
        eprintln!("fixture {i}: {:?}", start.elapsed());
    }
}
