use std::sync::Arc;

use num_complex::Complex64;

use super::moments::line_derivatives;
use super::report::{Diagnostics, LaurentEntry, SolutionReport};
use super::{
    assemble_ivp_system, check_contour, compute_ln, construct_r0, forcing_transform,
    solve_ivp_system, GeneralizedIC, IVPProblem, IvpError, Tolerances, R0,
};
use crate::diagnostics::Warning;
use crate::expr::{add, call, cnst, mul, pow, AnalyticExpr, Func, Node, Symbol};
use crate::laplace::{
    check_times, default_s_grid, estimate_decay, invert_sampled,
    widder_heuristic, ContourParams, DecayEstimate, ForcingTerm, GridFunction, Inversion,
    LineSamples, WidderReport,
};
use crate::residue::{residue_sum, ResiduePolynomial};

fn region_warnings(symbol: &Symbol) -> Vec<Warning> {
    symbol
        .region
        .spot_check(&symbol.expr)
        .into_iter()
        .map(|message| Warning::Sampling { message })
        .collect()
}

fn certified_option(d: &DecayEstimate) -> Option<usize> {
    match d.certified() {
        usize::MAX => None,
        m => Some(m),
    }
}

/// Solution of a generalized problem.
#[derive(Clone, Debug)]
pub struct GeneralizedSolution {
    pub inversion: Inversion,
    pub decay: DecayEstimate,
    /// `phi^(n)(0+)` for `n <= min(M, 3)`.
    pub trace: Vec<Complex64>,
    pub widder: WidderReport,
    pub r: AnalyticExpr,
    pub warnings: Vec<Warning>,
}

impl GeneralizedSolution {
    pub fn solution(&self) -> &GridFunction {
        &self.inversion.solution
    }

    pub fn report(&self) -> SolutionReport {
        SolutionReport {
            poles: Vec::new(),
            laurent: Vec::new(),
            r0: self.r.to_string(),
            trace: self.trace.clone(),
            diagnostics: Diagnostics {
                p_hat: self.decay.p_hat,
                certified_derivatives: certified_option(&self.decay),
                condition_number: 1.0,
                widder: self.widder.clone(),
                refinement: Some(self.inversion.refinement.clone()),
                tail_model: self.inversion.tail.clone(),
                max_imag: self.inversion.max_imag,
                l_values: Vec::new(),
                r0_identity_error: None,
                warnings: self.warnings.clone(),
            },
        }
    }
}

/// `phi = L^-1((L(J) + r)/f)` on `times`, with the Widder heuristic on the
/// working contour reported as a warning when it fails.
pub fn solve_generalized(
    symbol: &Symbol,
    j: &ForcingTerm,
    r: &GeneralizedIC,
    contour: &ContourParams,
    times: &[f64],
    tol: &Tolerances,
) -> Result<GeneralizedSolution, IvpError> {
    check_contour(symbol, j, contour)?;
    check_times(times)?;
    if let Some(p) = r.r.unbound().into_iter().next() {
        return Err(IvpError::InvalidProblem(format!("parameter `{p}` of r has no value")));
    }
    let g = forcing_transform(&symbol.expr, j, Some(&r.r));
    let decay = estimate_decay(&g, contour)?;
    let coarse = LineSamples::new(&g, contour)?;
    let fine = LineSamples::new(&g, &contour.refined())?;
    let inversion = invert_sampled(&coarse, &fine, times)?;
    let (trace, _) = line_derivatives(&coarse, &fine, decay.certified().min(3));
    let widder = widder_heuristic(
        &g,
        contour.abscissa,
        tol.widder_order,
        &default_s_grid(contour.abscissa),
        tol.widder_bound,
    );
    let mut warnings = region_warnings(symbol);
    warnings.extend(inversion.warnings.iter().cloned());
    warnings.extend(decay.warning());
    warnings.extend(widder.warnings.iter().cloned());
    warnings.extend(widder.warning());
    Ok(GeneralizedSolution {
        inversion,
        decay,
        trace,
        widder,
        r: r.r.clone(),
        warnings,
    })
}

/// Solution of a classical initial-value problem.
#[derive(Clone, Debug)]
pub struct IVPSolution {
    pub bromwich_part: GridFunction,
    pub residue_parts: Vec<ResiduePolynomial>,
    pub r0: R0,
    /// `phi^(n)(0)` for `n <= min(M, K + 2)`.
    pub derivative_trace: Vec<Complex64>,
    pub diagnostics: Diagnostics,
    forcing_is_zero: bool,
}

impl IVPSolution {
    /// Residue part `sum_i P_i(t) e^(w_i t)` on the solution grid.
    pub fn residue_part(&self) -> GridFunction {
        residue_sum(&self.residue_parts, self.bromwich_part.times())
            .expect("grid and poles were validated when solving")
    }

    /// `phi = phi_B + sum_i P_i e^(w_i t)`.
    pub fn total(&self) -> GridFunction {
        self.bromwich_part
            .add(&self.residue_part())
            .expect("same grid")
    }

    /// `phi` as an expression of `t` when the Bromwich part vanishes
    /// identically (`J = 0`); `None` otherwise.
    pub fn closed_form(&self) -> Option<AnalyticExpr> {
        if !self.forcing_is_zero {
            return None;
        }
        let t = Arc::new(Node::Var);
        let mut acc = cnst(Complex64::new(0.0, 0.0));
        for p in &self.residue_parts {
            let mut poly = cnst(Complex64::new(0.0, 0.0));
            let mut fact = 1.0;
            for (k, a) in p.coeffs.iter().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                }
                poly = add(poly, mul(cnst(a / fact), pow(t.clone(), k as i32)));
            }
            let e = call(Func::Exp, mul(cnst(p.pole.location), t.clone()));
            acc = add(acc, mul(poly, e));
        }
        Some(AnalyticExpr::from_node(acc, "t"))
    }

    pub fn report(&self) -> SolutionReport {
        SolutionReport {
            poles: self.residue_parts.iter().map(|p| p.pole).collect(),
            laurent: self
                .residue_parts
                .iter()
                .map(|p| LaurentEntry {
                    pole: p.pole,
                    coeffs: p.coeffs.clone(),
                })
                .collect(),
            r0: self.r0.expr.to_string(),
            trace: self.derivative_trace.clone(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// The classical pipeline: `L_n` from the Bromwich component, the Laurent
/// system, `r0`, and `phi = L^-1(L(J)/f) + sum_i P_i(t) e^(w_i t)`.
pub fn solve_classical_ivp(p: &IVPProblem, times: &[f64]) -> Result<IVPSolution, IvpError> {
    p.validate()?;
    check_times(times)?;
    let tol = &p.tolerances;
    let f = &p.symbol.expr;
    let k = p.k();
    let zero = p.forcing.is_zero();
    let g = forcing_transform(f, &p.forcing, None);
    let mut warnings = region_warnings(&p.symbol);

    let sampled = if zero {
        None
    } else {
        let decay = estimate_decay(&g, &p.contour)?;
        let coarse = LineSamples::new(&g, &p.contour)?;
        let fine = LineSamples::new(&g, &p.contour.refined())?;
        Some((decay, coarse, fine))
    };
    let decay = match &sampled {
        Some((d, _, _)) => d.clone(),
        None => DecayEstimate {
            p_hat: f64::INFINITY,
        },
    };
    let certified = decay.certified();
    if k > 0 && k - 1 > certified {
        return Err(IvpError::InsufficientDecay {
            n: k - 1,
            p_hat: decay.p_hat,
        });
    }
    let n_trace = certified.min(k + 2);
    let (l_values, l_refinement) = match &sampled {
        Some((_, coarse, fine)) => {
            let (v, r) = line_derivatives(coarse, fine, n_trace);
            (v, Some(r))
        }
        None => (vec![Complex64::new(0.0, 0.0); n_trace + 1], None),
    };

    let system = assemble_ivp_system(&p.poles, &l_values, &p.initial_values)?;
    let (coeffs, condition_number) = solve_ivp_system(&system, tol.genericity)?;
    let mut parts = Vec::with_capacity(p.poles.len());
    let mut at = 0;
    for pole in &p.poles {
        parts.push(ResiduePolynomial {
            pole: *pole,
            coeffs: coeffs[at..at + pole.order].to_vec(),
        });
        at += pole.order;
    }
    let r0 = construct_r0(f, &parts, tol)?;

    let (bromwich_part, refinement, tail_model, max_imag) = match &sampled {
        Some((_, coarse, fine)) => {
            let inv = invert_sampled(coarse, fine, times)?;
            warnings.extend(inv.warnings.iter().cloned());
            (inv.solution, Some(inv.refinement), inv.tail, inv.max_imag)
        }
        None => (
            GridFunction::new(times.to_vec(), vec![Complex64::new(0.0, 0.0); times.len()])?,
            None,
            None,
            0.0,
        ),
    };
    if let Some(r) = l_refinement.as_ref().and_then(|r| r.warning()) {
        warnings.push(r);
    }

    let derivative_trace = (0..=n_trace)
        .map(|n| {
            if n < k {
                p.initial_values[n]
            } else {
                l_values[n] + parts.iter().map(|q| q.term_derivative_at_zero(n)).sum::<Complex64>()
            }
        })
        .collect();

    let widder = widder_heuristic(
        &g,
        p.contour.abscissa,
        tol.widder_order,
        &default_s_grid(p.contour.abscissa),
        tol.widder_bound,
    );
    warnings.extend(decay.warning());
    warnings.extend(widder.warnings.iter().cloned());
    warnings.extend(widder.warning());
    warnings.extend(r0.warnings.iter().cloned());

    let residue = residue_sum(&parts, times)?;
    let max_imag = max_imag.max(bromwich_part.add(&residue)?.max_imag());
    Ok(IVPSolution {
        bromwich_part,
        residue_parts: parts,
        derivative_trace,
        diagnostics: Diagnostics {
            p_hat: decay.p_hat,
            certified_derivatives: certified_option(&decay),
            condition_number,
            widder,
            refinement,
            tail_model,
            max_imag,
            l_values,
            r0_identity_error: Some(r0.identity_error),
            warnings,
        },
        r0,
        forcing_is_zero: zero,
    })
}

/// `phi^(n)(0)` for `n <= n_max`: imposed data below `K`, and
/// `L_n + sum_i sum_k C(n,k) w_i^k P_i^(n-k)(0)` from `K` on.
pub fn derivative_trace(
    sol: &IVPSolution,
    p: &IVPProblem,
    n_max: usize,
) -> Result<Vec<Complex64>, IvpError> {
    if n_max < sol.derivative_trace.len() {
        return Ok(sol.derivative_trace[..=n_max].to_vec());
    }
    let l = compute_ln(&p.symbol.expr, &p.forcing, &p.contour, n_max)?;
    let k = p.k();
    Ok((0..=n_max)
        .map(|n| {
            if n < k {
                p.initial_values[n]
            } else {
                l.values[n]
                    + sol
                        .residue_parts
                        .iter()
                        .map(|q| q.term_derivative_at_zero(n))
                        .sum::<Complex64>()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, parse_expr_in, GammaRegion};
    use crate::laplace::uniform_times;
    use crate::residue::PoleSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn symbol(text: &str) -> Symbol {
        Symbol::new(parse_expr(text).unwrap(), GammaRegion::new(10.0, 0.0).unwrap())
    }

    fn harmonic() -> IVPProblem {
        IVPProblem::new(
            symbol("s^2 + 1"),
            ForcingTerm::zero(),
            vec![PoleSpec::simple(c(0.0, 1.0)), PoleSpec::simple(c(0.0, -1.0))],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            ContourParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn harmonic_oscillator() {
        let p = harmonic();
        let times = uniform_times(0.0, 10.0, 201);
        let sol = solve_classical_ivp(&p, &times).unwrap();
        for (t, v) in sol.total().iter() {
            assert!((v - c(t.cos(), 0.0)).norm() < 1e-12, "t = {t}");
        }
        let trace = derivative_trace(&sol, &p, 3).unwrap();
        let want = [1.0, 0.0, -1.0, 0.0];
        for (n, w) in want.iter().enumerate() {
            assert!((trace[n] - c(*w, 0.0)).norm() < 1e-12);
        }
        let cf = sol.closed_form().unwrap();
        assert!((cf.eval_real(2.0).unwrap() - c(2f64.cos(), 0.0)).norm() < 1e-14);
        for z in [c(0.3, 0.2), c(2.0, -1.0)] {
            assert!((sol.r0.expr.eval(z).unwrap() - z).norm() < 1e-12);
        }
    }

    #[test]
    fn exponential_growth() {
        let lambda = 0.4;
        let p = IVPProblem::new(
            Symbol::new(
                parse_expr("s - l").unwrap().with_param("l", lambda),
                GammaRegion::new(10.0, 0.0).unwrap(),
            ),
            ForcingTerm::zero(),
            vec![PoleSpec::simple(c(lambda, 0.0))],
            vec![c(1.0, 0.0)],
            ContourParams::default(),
        )
        .unwrap();
        let sol = solve_classical_ivp(&p, &[0.0, 1.0, 3.0]).unwrap();
        for (t, v) in sol.total().iter() {
            assert!((v.re - (lambda * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_second_order() {
        // phi'' + phi' - 2 phi = 1, phi(0) = phi'(0) = 0
        let p = IVPProblem::new(
            symbol("(s - 1)*(s + 2)"),
            ForcingTerm::closed_form(parse_expr_in("1", "t").unwrap()).unwrap(),
            vec![PoleSpec::simple(c(1.0, 0.0)), PoleSpec::simple(c(-2.0, 0.0))],
            vec![c(0.0, 0.0); 2],
            ContourParams::default().with_abscissa(1.2),
        )
        .unwrap();
        let times = uniform_times(0.0, 3.0, 31);
        let sol = solve_classical_ivp(&p, &times).unwrap();
        let exact = |t: f64| -0.5 + t.exp() / 3.0 + (-2.0 * t).exp() / 6.0;
        for (t, v) in sol.total().iter() {
            assert!((v.re - exact(t)).abs() < 1e-6, "t = {t}: {v}");
        }
        assert!((sol.derivative_trace[2] - c(1.0, 0.0)).norm() < 1e-6);
        assert!(sol.closed_form().is_none());
    }

    #[test]
    fn trace_beyond_decay() {
        let p = IVPProblem::new(
            symbol("(s - 1)*(s + 2)"),
            ForcingTerm::closed_form(parse_expr_in("t*exp(-t)", "t").unwrap()).unwrap(),
            vec![PoleSpec::simple(c(1.0, 0.0)), PoleSpec::simple(c(-2.0, 0.0))],
            vec![c(0.0, 0.0); 2],
            ContourParams::default().with_abscissa(1.2),
        )
        .unwrap();
        let sol = solve_classical_ivp(&p, &[0.0, 1.0]).unwrap();
        assert_eq!(sol.diagnostics.certified_derivatives, Some(3));
        assert!(matches!(
            derivative_trace(&sol, &p, 5),
            Err(IvpError::InsufficientDecay { n: 5, .. })
        ));
    }

    #[test]
    fn generalized_ramp_plus_constant() {
        let r = GeneralizedIC::new(parse_expr("p").unwrap().with_param("p", 0.7));
        let sol = solve_generalized(
            &symbol("s"),
            &ForcingTerm::closed_form(parse_expr_in("1", "t").unwrap()).unwrap(),
            &r,
            &ContourParams::default(),
            &uniform_times(0.0, 5.0, 51),
            &Tolerances::default(),
        )
        .unwrap();
        for (t, v) in sol.solution().iter() {
            assert!((v.re - (t + 0.7)).abs() < 1e-6, "t = {t}: {v}");
        }
    }

    #[test]
    fn generalized_cosine() {
        let sol = solve_generalized(
            &symbol("s^2 + 1"),
            &ForcingTerm::zero(),
            &GeneralizedIC::new(parse_expr("s").unwrap()),
            &ContourParams::default(),
            &uniform_times(0.0, 5.0, 51),
            &Tolerances::default(),
        )
        .unwrap();
        for (t, v) in sol.solution().iter() {
            assert!((v.re - t.cos()).abs() < 1e-3);
        }
    }

    #[test]
    fn invalid_problems() {
        let bad_k = IVPProblem::new(
            symbol("s^2 + 1"),
            ForcingTerm::zero(),
            vec![PoleSpec::simple(c(0.0, 1.0))],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            ContourParams::default(),
        );
        assert!(matches!(bad_k, Err(IvpError::ShapeMismatch { .. })));
        let right = IVPProblem::new(
            symbol("s - 2"),
            ForcingTerm::zero(),
            vec![PoleSpec::simple(c(2.0, 0.0))],
            vec![c(1.0, 0.0)],
            ContourParams::default(),
        );
        assert!(matches!(right, Err(IvpError::Residue(_))));
    }
}
