mod common;

use common::*;
use nonlocal_core::expr::parse_expr_in;
use nonlocal_core::laplace::{
    bromwich_invert, bromwich_sum, estimate_decay, laplace_forward, ContourParams, ForcingTerm,
    LaplaceError,
};
use num_complex::Complex64;
use proptest::prelude::*;

const TIMES: [f64; 7] = [0.0, 0.1, 0.5, 1.0, 2.0, 3.5, 5.0];

type G = Box<dyn Fn(Complex64) -> Complex64 + Sync>;

/// Random real rational transforms with an exact inverse: `1/(s+a)^k` or
/// `1/((s+a)^2 + b^2)`.
fn rational() -> impl Strategy<Value = (u8, f64, f64, u32)> {
    (0u8..2, -0.5..2.0f64, 0.3..3.0f64, 1u32..4)
}

fn build(kind: u8, a: f64, b: f64, k: u32) -> (G, Box<dyn Fn(f64) -> f64>) {
    if kind == 0 {
        let fact = (1..k).fold(1.0, |acc, j| acc * j as f64);
        (
            Box::new(move |s: Complex64| (s + a).powu(k).inv()),
            Box::new(move |t: f64| t.powi(k as i32 - 1) * (-a * t).exp() / fact),
        )
    } else {
        (
            Box::new(move |s: Complex64| ((s + a) * (s + a) + b * b).inv()),
            Box::new(move |t: f64| (-a * t).exp() * (b * t).sin() / b),
        )
    }
}

fn lift(g: &G) -> impl Fn(Complex64) -> Result<Complex64, LaplaceError> + Sync + '_ {
    move |s| Ok(g(s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inversion_is_linear(p in rational(), q in rational(), lambda in -3.0..3.0f64) {
        let (g1, _) = build(p.0, p.1, p.2, p.3);
        let (g2, _) = build(q.0, q.1, q.2, q.3);
        let contour = ContourParams::default();
        let v1 = bromwich_sum(&lift(&g1), &contour, &TIMES).unwrap();
        let v2 = bromwich_sum(&lift(&g2), &contour, &TIMES).unwrap();
        let mix = |s: Complex64| Ok::<_, LaplaceError>(g1(s) + lambda * g2(s));
        let vm = bromwich_sum(&mix, &contour, &TIMES).unwrap();
        for i in 0..TIMES.len() {
            let want = v1[i] + lambda * v2[i];
            // the sums carry a factor e^(ct), which scales their roundoff
            let budget = 1e-12 * (contour.abscissa * TIMES[i]).exp() * (1.0 + want.norm());
            prop_assert!((vm[i] - want).norm() < budget, "t = {}: gap {:e}", TIMES[i], (vm[i] - want).norm());
        }
    }

    #[test]
    fn real_transforms_invert_to_real_functions(p in rational()) {
        let (g, exact) = build(p.0, p.1, p.2, p.3);
        let inv = bromwich_invert(&lift(&g), &ContourParams::default(), &TIMES).unwrap();
        prop_assert!(inv.max_imag < 1e-12, "imag {}", inv.max_imag);
        for (t, v) in inv.solution.iter() {
            if t > 0.0 {
                prop_assert!((v.re - exact(t)).abs() < 1e-5, "t = {}: {} vs {}", t, v.re, exact(t));
            }
        }
    }

    #[test]
    fn decay_exponent_is_recovered(a in -0.5..2.0f64, k in 1u32..6) {
        let g = move |s: Complex64| Ok::<_, LaplaceError>((s + a).powu(k).inv());
        let d = estimate_decay(&g, &ContourParams::default()).unwrap();
        prop_assert!((d.p_hat - k as f64).abs() < 0.1, "k = {}: {}", k, d.p_hat);
        prop_assert_eq!(d.certified(), k as usize - 1);
    }
}

#[test]
fn quadrature_transform_matches_closed_forms() {
    let cases: [(&str, f64, fn(Complex64) -> Complex64); 3] = [
        ("1/exp(t)", -1.0, |s| (s + 1.0).inv()),
        ("t/exp(2*t)", -2.0, |s| (s + 2.0).powu(2).inv()),
        ("sin(t)/exp(t)", -1.0, |s| ((s + 1.0) * (s + 1.0) + 1.0).inv()),
    ];
    for (text, growth, exact) in cases {
        let j = ForcingTerm::with_growth(parse_expr_in(text, "t").unwrap(), growth).unwrap();
        assert!(j.table().is_none(), "{text} should take the quadrature path");
        for s in [c(1.0, 0.0), c(0.5, 3.0), c(2.0, -7.0)] {
            let got = laplace_forward(&j, s).unwrap();
            assert!((got - exact(s)).norm() < 1e-10, "{text} at {s}: {got}");
        }
    }
}

#[test]
fn table_transform_matches_closed_forms() {
    let j = forcing("t^2*exp(-t) + 3*cos(2*t)");
    for s in [c(1.0, 0.0), c(0.5, 3.0)] {
        let want = 2.0 / (s + 1.0).powu(3) + 3.0 * s / (s * s + 4.0);
        assert!((laplace_forward(&j, s).unwrap() - want).norm() < 1e-14);
    }
}
