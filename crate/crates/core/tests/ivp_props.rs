mod common;

use common::*;
use nonlocal_core::expr::{parse_expr, parse_expr_in, GammaRegion, Symbol};
use nonlocal_core::ivp::{
    compute_ln, solve_classical_ivp, solve_generalized, GeneralizedIC, IVPProblem, Tolerances,
};
use nonlocal_core::laplace::{ContourParams, ForcingTerm};
use nonlocal_core::residue::PoleSpec;
use num_complex::Complex64;
use proptest::prelude::*;

const TIMES: [f64; 6] = [0.0, 0.3, 0.9, 1.5, 2.2, 3.0];

fn quadratic(a: f64, b: f64) -> Symbol {
    Symbol::new(
        parse_expr("(s - a)*(s - b)").unwrap().with_params([("a", a), ("b", b)]),
        GammaRegion::new(10.0, 0.0).unwrap(),
    )
}

fn forcing_ab(p: f64, q: f64) -> ForcingTerm {
    ForcingTerm::closed_form(
        parse_expr_in("p*exp(-t) + q*t", "t")
            .unwrap()
            .with_params([("p", p), ("q", q)]),
    )
    .unwrap()
}

fn problem(a: f64, b: f64, j: ForcingTerm, init: [f64; 2]) -> IVPProblem {
    IVPProblem::new(
        quadratic(a, b),
        j,
        vec![PoleSpec::simple(c(a, 0.0)), PoleSpec::simple(c(b, 0.0))],
        init.iter().map(|v| c(*v, 0.0)).collect(),
        ContourParams::default().with_abscissa(a.max(b).max(0.0) + 1.0),
    )
    .unwrap()
}

fn distinct_roots() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..0.5f64, -2.0..0.5f64).prop_filter("roots too close", |(a, b)| (a - b).abs() > 0.3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn solution_is_linear_in_data_and_forcing(
        (a, b) in distinct_roots(),
        u in prop::array::uniform4(-1.0..1.0f64),
        jp in prop::array::uniform4(-1.0..1.0f64),
        lambda in -2.0..2.0f64,
    ) {
        let s1 = solve_classical_ivp(&problem(a, b, forcing_ab(jp[0], jp[1]), [u[0], u[1]]), &TIMES).unwrap();
        let s2 = solve_classical_ivp(&problem(a, b, forcing_ab(jp[2], jp[3]), [u[2], u[3]]), &TIMES).unwrap();
        let mix = solve_classical_ivp(
            &problem(
                a,
                b,
                forcing_ab(jp[0] + lambda * jp[2], jp[1] + lambda * jp[3]),
                [u[0] + lambda * u[2], u[1] + lambda * u[3]],
            ),
            &TIMES,
        )
        .unwrap();
        let (t1, t2, tm) = (s1.total(), s2.total(), mix.total());
        for i in 0..TIMES.len() {
            let want = t1.values()[i] + lambda * t2.values()[i];
            let got = tm.values()[i];
            prop_assert!((got - want).norm() < 1e-9 * (1.0 + want.norm()), "t = {}: {} vs {}", TIMES[i], got, want);
        }
    }

    #[test]
    fn conjugate_poles_give_real_solutions(
        a in -1.5..0.5f64,
        b in 0.3..2.0f64,
        u in prop::array::uniform2(-1.0..1.0f64),
        jp in prop::array::uniform2(-1.0..1.0f64),
    ) {
        let f = Symbol::new(
            parse_expr("(s - a)^2 + b^2").unwrap().with_params([("a", a), ("b", b)]),
            GammaRegion::new(10.0, 0.0).unwrap(),
        );
        let p = IVPProblem::new(
            f,
            forcing_ab(jp[0], jp[1]),
            vec![PoleSpec::simple(c(a, b)), PoleSpec::simple(c(a, -b))],
            vec![c(u[0], 0.0), c(u[1], 0.0)],
            ContourParams::default().with_abscissa(a.max(0.0) + 1.0),
        )
        .unwrap();
        let sol = solve_classical_ivp(&p, &TIMES).unwrap();
        prop_assert!(sol.total().max_imag() < 1e-10);
        prop_assert!(sol.derivative_trace.iter().all(|d| d.im.abs() < 1e-8));
        // conjugate poles carry conjugate Laurent data
        let (p0, p1) = (&sol.residue_parts[0], &sol.residue_parts[1]);
        prop_assert!((p0.coeffs[0] - p1.coeffs[0].conj()).norm() < 1e-10);
    }

    /// Data equal to the Bromwich traces `L_n` leave no residue part: the
    /// classical solution is the generalized one with `r = 0`, and `r0`
    /// vanishes. Any other data produce a nonzero `r0`.
    #[test]
    fn zero_residue_part_iff_zero_r(
        (a, b) in distinct_roots(),
        jp in prop::array::uniform2(0.2..1.0f64),
        shift in prop::array::uniform2(0.1..1.0f64),
    ) {
        let j = forcing_ab(jp[0], jp[1]);
        let f = quadratic(a, b);
        let contour = ContourParams::default().with_abscissa(a.max(b).max(0.0) + 1.0);
        let l = compute_ln(&f.expr, &j, &contour, 1).unwrap().values;
        let matched = problem(a, b, j.clone(), [l[0].re, l[1].re]);
        let sol = solve_classical_ivp(&matched, &TIMES).unwrap();
        for part in &sol.residue_parts {
            prop_assert!(part.coeffs.iter().all(|x| x.norm() < 1e-8));
        }
        for z in [c(0.5, 1.0), c(2.0, -0.5), c(-1.0, 3.0)] {
            prop_assert!(sol.r0.expr.eval(z).unwrap().norm() < 1e-7);
        }
        let gen = solve_generalized(&f, &j, &GeneralizedIC::zero(), &contour, &TIMES, &Tolerances::default()).unwrap();
        let total = sol.total();
        for (x, y) in total.values().iter().zip(gen.solution().values()) {
            prop_assert!((x - y).norm() < 1e-8);
        }

        let moved = problem(a, b, j, [l[0].re + shift[0], l[1].re - shift[1]]);
        let sol = solve_classical_ivp(&moved, &TIMES).unwrap();
        let r0_size: f64 = [c(0.5, 1.0), c(2.0, -0.5)]
            .iter()
            .map(|z| sol.r0.expr.eval(*z).unwrap().norm())
            .fold(0.0, f64::max);
        prop_assert!(r0_size > 1e-3);
    }
}

#[test]
fn generalized_solution_with_r0_matches_classical() {
    // L^-1((L(J) + r0)/f) is the classical solution.
    let p = problem(-0.5, -1.7, forcing_ab(0.8, -0.3), [0.4, -0.9]);
    let sol = solve_classical_ivp(&p, &TIMES).unwrap();
    let gen = solve_generalized(
        &p.symbol,
        &p.forcing,
        &GeneralizedIC::new(sol.r0.expr.clone()),
        &p.contour,
        &TIMES,
        &Tolerances::default(),
    )
    .unwrap();
    let total = sol.total();
    for (x, y) in total.values().iter().zip(gen.solution().values()) {
        assert!((x - y).norm() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn zero_data_zero_forcing_is_zero() {
    let sol = solve_classical_ivp(&problem(-0.5, 0.2, ForcingTerm::zero(), [0.0, 0.0]), &TIMES).unwrap();
    assert!(sol.total().max_abs() == 0.0);
    assert_eq!(sol.derivative_trace, vec![Complex64::new(0.0, 0.0); 5]);
}
