//! Real-line quadrature of complex integrands.

use num_complex::Complex64;

// 15-point Kronrod nodes on [0, 1] (symmetric) with the embedded 7-point
// Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 15 panel: (Kronrod estimate, |Kronrod - Gauss|).
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Adaptive bisection on GK15 panels to absolute tolerance `tol`.
/// Returns `None` when `max_depth` bisections do not reach it.
pub fn adaptive_gk15<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Option<Complex64> {
    let (val, err) = gk15(f, a, b);
    if err <= tol || (b - a).abs() < 1e-12 * a.abs().max(1.0) {
        return Some(val);
    }
    if max_depth == 0 {
        return None;
    }
    let m = 0.5 * (a + b);
    Some(adaptive_gk15(f, a, m, 0.5 * tol, max_depth - 1)? + adaptive_gk15(f, m, b, 0.5 * tol, max_depth - 1)?)
}

/// Composite Simpson rule on a possibly non-uniform grid. Interval pairs
/// use the three-point rule fitted to their own spacing; an odd final
/// interval uses the quadratic through its last three points.
pub fn simpson(x: &[f64], y: &[Complex64]) -> Complex64 {
    let n = x.len();
    assert_eq!(n, y.len());
    match n {
        0 | 1 => return Complex64::new(0.0, 0.0),
        2 => return (y[0] + y[1]) * (0.5 * (x[1] - x[0])),
        _ => {}
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut i = 0;
    while i + 2 < n {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += (y[i] * (2.0 - h1 / h0) + y[i + 1] * (hs * hs / (h0 * h1)) + y[i + 2] * (2.0 - h0 / h1))
            * (hs / 6.0);
        i += 2;
    }
    if i + 1 < n {
        // last interval [x_{n-2}, x_{n-1}] from the parabola through the
        // last three points
        let h0 = x[n - 2] - x[n - 3];
        let h1 = x[n - 1] - x[n - 2];
        let a = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let b = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let c = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += y[n - 1] * a + y[n - 2] * b - y[n - 3] * c;
    }
    total
}
