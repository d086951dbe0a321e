use num_complex::Complex64;
use serde::Serialize;

use super::quad::{adaptive_gk15, simpson};
use super::{GridFunction, LaplaceError};
use crate::expr::{AnalyticExpr, Func, Node};

/// `coeff * t^power * e^(rate t)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpTerm {
    #[serde(serialize_with = "crate::cjson::one")]
    pub coeff: Complex64,
    pub power: u32,
    #[serde(serialize_with = "crate::cjson::one")]
    pub rate: Complex64,
}

/// A finite sum of [`ExpTerm`]s, the closed forms with a table transform.
/// Sines and cosines are carried as complex exponentials.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExpPoly {
    terms: Vec<ExpTerm>,
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly::default()
    }

    pub fn term(coeff: Complex64, power: u32, rate: Complex64) -> Self {
        ExpPoly::zero().plus(ExpTerm { coeff, power, rate })
    }

    pub fn constant(c: Complex64) -> Self {
        Self::term(c, 0, Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    fn plus(mut self, t: ExpTerm) -> Self {
        if t.coeff == Complex64::new(0.0, 0.0) {
            return self;
        }
        match self
            .terms
            .iter_mut()
            .find(|u| u.power == t.power && u.rate == t.rate)
        {
            Some(u) => u.coeff += t.coeff,
            None => self.terms.push(t),
        }
        self.terms.retain(|u| u.coeff != Complex64::new(0.0, 0.0));
        self
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        other.terms.iter().fold(self.clone(), |acc, t| acc.plus(*t))
    }

    pub fn scale(&self, c: Complex64) -> ExpPoly {
        self.terms.iter().fold(ExpPoly::zero(), |acc, t| {
            acc.plus(ExpTerm {
                coeff: t.coeff * c,
                ..*t
            })
        })
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out = out.plus(ExpTerm {
                    coeff: a.coeff * b.coeff,
                    power: a.power + b.power,
                    rate: a.rate + b.rate,
                });
            }
        }
        out
    }

    /// Constant value, if the sum is a constant.
    fn as_constant(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(Complex64::new(0.0, 0.0)),
            [t] if t.power == 0 && t.rate == Complex64::new(0.0, 0.0) => Some(t.coeff),
            _ => None,
        }
    }

    /// `(alpha, beta)` when the sum is `alpha + beta t`.
    fn as_affine(&self) -> Option<(Complex64, Complex64)> {
        let mut alpha = Complex64::new(0.0, 0.0);
        let mut beta = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if t.rate != Complex64::new(0.0, 0.0) {
                return None;
            }
            match t.power {
                0 => alpha += t.coeff,
                1 => beta += t.coeff,
                _ => return None,
            }
        }
        Some((alpha, beta))
    }

    /// `e^(alpha + beta t)`
    fn exp_affine(alpha: Complex64, beta: Complex64) -> ExpPoly {
        ExpPoly::term(alpha.exp(), 0, beta)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|u| u.coeff * t.powi(u.power as i32) * (u.rate * t).exp())
            .sum()
    }

    /// `J^(m)(0)` by the Leibniz rule on each term.
    pub fn derivative_at_zero(&self, m: u32) -> Complex64 {
        self.terms
            .iter()
            .filter(|u| u.power <= m)
            .map(|u| {
                // d^m/dt^m [t^k e^(lambda t)] at 0 = C(m,k) k! lambda^(m-k)
                let k = u.power;
                u.coeff * binomial(m, k) * factorial(k) * u.rate.powu(m - k)
            })
            .sum()
    }

    /// `sum c k!/(s - lambda)^(k+1)`
    pub fn transform(&self, s: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|u| u.coeff * factorial(u.power) / (s - u.rate).powu(u.power + 1))
            .sum()
    }

    /// Abscissa of convergence: the largest `Re(lambda)`, `-inf` when zero.
    pub fn growth(&self) -> f64 {
        self.terms
            .iter()
            .fold(f64::NEG_INFINITY, |m, u| m.max(u.rate.re))
    }

    /// Recognizes sums of `t^k e^(wt) {1, sin(bt), cos(bt)}` (and anything
    /// that multiplies out to such a sum) in an expression of `t`.
    /// Parameters must be bound.
    pub fn from_expr(e: &AnalyticExpr) -> Option<ExpPoly> {
        Self::from_node(e.inline_params().root())
    }

    fn from_node(n: &Node) -> Option<ExpPoly> {
        let i = Complex64::new(0.0, 1.0);
        Some(match n {
            Node::Const(c) => ExpPoly::constant(*c),
            Node::Var => ExpPoly::term(Complex64::new(1.0, 0.0), 1, Complex64::new(0.0, 0.0)),
            Node::Param(_) => return None,
            Node::Neg(a) => Self::from_node(a)?.scale(Complex64::new(-1.0, 0.0)),
            Node::Add(a, b) => Self::from_node(a)?.add(&Self::from_node(b)?),
            Node::Sub(a, b) => Self::from_node(a)?
                .add(&Self::from_node(b)?.scale(Complex64::new(-1.0, 0.0))),
            Node::Mul(a, b) => Self::from_node(a)?.mul(&Self::from_node(b)?),
            Node::Div(a, b) => {
                let d = Self::from_node(b)?.as_constant()?;
                if d == Complex64::new(0.0, 0.0) {
                    return None;
                }
                Self::from_node(a)?.scale(d.inv())
            }
            Node::Pow(a, k) => {
                let base = Self::from_node(a)?;
                if *k < 0 {
                    let c = base.as_constant()?;
                    if c == Complex64::new(0.0, 0.0) {
                        return None;
                    }
                    return Some(ExpPoly::constant(c.powi(*k)));
                }
                (0..*k).fold(ExpPoly::constant(Complex64::new(1.0, 0.0)), |acc, _| {
                    acc.mul(&base)
                })
            }
            Node::Call(f, a) => {
                let arg = Self::from_node(a)?;
                if let Some(c) = arg.as_constant() {
                    let v = match f {
                        Func::Exp => c.exp(),
                        Func::Sin => c.sin(),
                        Func::Cos => c.cos(),
                        Func::Sqrt => c.sqrt(),
                        Func::Log if c != Complex64::new(0.0, 0.0) => c.ln(),
                        Func::Log => return None,
                    };
                    return Some(ExpPoly::constant(v));
                }
                let (alpha, beta) = arg.as_affine()?;
                let plus = Self::exp_affine(i * alpha, i * beta);
                let minus = Self::exp_affine(-i * alpha, -i * beta);
                match f {
                    Func::Exp => Self::exp_affine(alpha, beta),
                    Func::Sin => plus
                        .add(&minus.scale(Complex64::new(-1.0, 0.0)))
                        .scale((2.0 * i).inv()),
                    Func::Cos => plus.add(&minus).scale(Complex64::new(0.5, 0.0)),
                    Func::Sqrt | Func::Log => return None,
                }
            }
        })
    }
}

/// The right-hand side `J(t)` of `f(d/dt) phi = J`.
#[derive(Clone, Debug)]
pub enum ForcingTerm {
    /// A closed form in `t`. `table` holds its exponential-polynomial form
    /// when one exists; otherwise transforms use quadrature and `growth`
    /// is the declared bound `|J(t)| <= C e^(growth t)`.
    ClosedForm {
        expr: AnalyticExpr,
        table: Option<ExpPoly>,
        growth: f64,
    },
    /// Grid samples, taken to vanish past the last time.
    Sampled { grid: GridFunction, growth: f64 },
}

impl ForcingTerm {
    pub fn zero() -> Self {
        ForcingTerm::ClosedForm {
            expr: AnalyticExpr::constant(Complex64::new(0.0, 0.0), "t"),
            table: Some(ExpPoly::zero()),
            growth: f64::NEG_INFINITY,
        }
    }

    /// A table-transformable closed form. Fails for expressions outside
    /// the table; use [`ForcingTerm::with_growth`] for those.
    pub fn closed_form(expr: AnalyticExpr) -> Result<Self, LaplaceError> {
        let unbound = expr.unbound();
        if let Some(p) = unbound.into_iter().next() {
            return Err(LaplaceError::Forcing(format!("parameter `{p}` has no value")));
        }
        let table = ExpPoly::from_expr(&expr.inline_params()).ok_or_else(|| {
            LaplaceError::Forcing(format!(
                "`{expr}` is not a sum of t^k e^(wt) {{1, sin, cos}} terms; declare a growth bound"
            ))
        })?;
        let growth = table.growth();
        Ok(ForcingTerm::ClosedForm {
            expr,
            table: Some(table),
            growth,
        })
    }

    /// A closed form with a declared exponential growth bound. Table forms
    /// are still recognized and used when available.
    pub fn with_growth(expr: AnalyticExpr, growth: f64) -> Result<Self, LaplaceError> {
        if let Some(p) = expr.unbound().into_iter().next() {
            return Err(LaplaceError::Forcing(format!("parameter `{p}` has no value")));
        }
        if !growth.is_finite() {
            return Err(LaplaceError::Forcing(format!("growth bound {growth} is not finite")));
        }
        let table = ExpPoly::from_expr(&expr.inline_params());
        let growth = match &table {
            Some(t) => t.growth().max(growth),
            None => growth,
        };
        Ok(ForcingTerm::ClosedForm {
            expr,
            table,
            growth,
        })
    }

    /// Grid samples with the bound `|J(t)| <= bound e^(growth t)` checked at
    /// every sample.
    pub fn sampled(grid: GridFunction, growth: f64, bound: f64) -> Result<Self, LaplaceError> {
        if !(growth.is_finite() && bound.is_finite() && bound >= 0.0) {
            return Err(LaplaceError::Forcing(format!(
                "growth {growth} and bound {bound} must be finite, bound >= 0"
            )));
        }
        for (t, v) in grid.iter() {
            if v.norm() > bound * (growth * t).exp() * (1.0 + 1e-12) {
                return Err(LaplaceError::Forcing(format!(
                    "|J({t})| = {} exceeds {bound} e^({growth} t)",
                    v.norm()
                )));
            }
        }
        Ok(ForcingTerm::Sampled { grid, growth })
    }

    pub fn growth(&self) -> f64 {
        match self {
            ForcingTerm::ClosedForm { growth, .. } | ForcingTerm::Sampled { growth, .. } => *growth,
        }
    }

    pub fn table(&self) -> Option<&ExpPoly> {
        match self {
            ForcingTerm::ClosedForm { table, .. } => table.as_ref(),
            ForcingTerm::Sampled { .. } => None,
        }
    }

    /// True when `J` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            ForcingTerm::ClosedForm { table: Some(t), .. } => t.terms().is_empty(),
            ForcingTerm::ClosedForm { .. } => false,
            ForcingTerm::Sampled { grid, .. } => grid.values().iter().all(|v| v.norm() == 0.0),
        }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64, LaplaceError> {
        match self {
            ForcingTerm::ClosedForm {
                table: Some(tab), ..
            } => Ok(tab.eval(t)),
            ForcingTerm::ClosedForm { expr, .. } => Ok(expr.eval_real(t)?),
            ForcingTerm::Sampled { grid, .. } => {
                let ts = grid.times();
                let vs = grid.values();
                if t < ts[0] || t > ts[ts.len() - 1] {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let j = ts.partition_point(|x| *x < t);
                if ts[j] == t {
                    return Ok(vs[j]);
                }
                let w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
                Ok(vs[j - 1] * (1.0 - w) + vs[j] * w)
            }
        }
    }
}

/// Largest number of unit-scale chunks tried before giving up on the tail.
const MAX_CHUNKS: usize = 20_000;
const TAIL_TOL: f64 = 1e-14;

/// `L(J)(s) = int_0^inf e^(-st) J(t) dt` for `Re(s) > growth(J)`.
pub fn laplace_forward(j: &ForcingTerm, s: Complex64) -> Result<Complex64, LaplaceError> {
    let growth = j.growth();
    if s.re <= growth || !(s.re.is_finite() && s.im.is_finite()) {
        return Err(LaplaceError::Domain { s, growth });
    }
    match j {
        ForcingTerm::ClosedForm {
            table: Some(tab), ..
        } => Ok(tab.transform(s)),
        ForcingTerm::ClosedForm { expr, .. } => {
            let integrand = |t: f64| -> Complex64 {
                match expr.eval_real(t) {
                    Ok(v) => (-s * t).exp() * v,
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            };
            // chunk length tied to the decay rate of the bound
            let width = (1.0 / (s.re - growth)).clamp(1e-3, 1.0);
            let mut total = Complex64::new(0.0, 0.0);
            let mut quiet = 0;
            for k in 0..MAX_CHUNKS {
                let a = k as f64 * width;
                let b = a + width;
                let piece = adaptive_gk15(&integrand, a, b, 1e-15, 30)
                    .filter(|v| v.re.is_finite() && v.im.is_finite())
                    .ok_or(LaplaceError::QuadratureFailure { s })?;
                total += piece;
                // tail of the bound past b: |J(b)| e^(-Re s b) / (Re s - growth)
                let edge = integrand(b).norm() / (s.re - growth);
                if edge.max(piece.norm()) < TAIL_TOL * total.norm().max(1.0) {
                    quiet += 1;
                    if quiet >= 3 {
                        return Ok(total);
                    }
                } else {
                    quiet = 0;
                }
            }
            Err(LaplaceError::QuadratureFailure { s })
        }
        ForcingTerm::Sampled { grid, .. } => {
            let ys: Vec<Complex64> = grid
                .iter()
                .map(|(t, v)| (-s * t).exp() * v)
                .collect();
            Ok(simpson(grid.times(), &ys))
        }
    }
}
