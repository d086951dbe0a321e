//! The three subcommands. Each returns `Ok` or a [`CliError`] that knows its
//! exit code: 1 for configuration and parse errors, 2 for everything the
//! solvers reject.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nonlocal_core::expr::{find_zero, parse_expr, parse_expr_in, ParseError};
use nonlocal_core::ivp::{solve_classical_ivp, solve_generalized};
use nonlocal_core::laplace::{bromwich_invert, ContourParams, GridFunction, Refinement, TailModel};
use nonlocal_core::residue::{truncated_pole_sum, FamilyReport};
use nonlocal_core::verify::{verify_target, SmoothVector, VerificationReport, VerifyError, VerifyTarget};
use nonlocal_core::Warning;
use serde::Serialize;
use thiserror::Error;

use crate::config::{parse_bound, ConfigError, GridSection, Problem, Resolved, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Solver(#[from] nonlocal_core::Error),
    #[error("residual {residual:e} is not below the tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse(_) => 1,
            _ => 2,
        }
    }
}

fn solver<E: Into<nonlocal_core::Error>>(e: E) -> CliError {
    CliError::Solver(e.into())
}

pub struct Options {
    pub out_dir: PathBuf,
    pub quiet: bool,
}

fn load(config: &Path) -> Result<Resolved, CliError> {
    let cfg = RunConfig::load(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    Ok(cfg.resolve(base)?)
}

fn write_file(dir: &Path, name: &Path, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let io = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(&path, bytes).map_err(io)?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialize");
    out.push(b'\n');
    out
}

fn report_warnings(warnings: &[Warning], quiet: bool) {
    if !quiet {
        for w in warnings {
            eprintln!("warning: {w}");
        }
    }
}

#[derive(Serialize)]
struct InvertReport<'a> {
    max_imag: f64,
    tail_model: &'a Option<TailModel>,
    refinement: &'a Refinement,
    warnings: &'a [Warning],
}

#[derive(Serialize)]
struct WithFamily<T: Serialize> {
    #[serde(flatten)]
    report: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilyReport>,
}

/// `solve --config`: solution CSV plus the JSON report.
pub fn run_solve(config: &Path, opts: &Options) -> Result<(), CliError> {
    let r = load(config)?;
    let (grid, report, warnings): (GridFunction, Vec<u8>, Vec<Warning>) = match &r.problem {
        Problem::Classical(p) => {
            let sol = solve_classical_ivp(p, &r.times).map_err(solver)?;
            let report = sol.report();
            let warnings = report.diagnostics.warnings.clone();
            (sol.total(), json(&report), warnings)
        }
        Problem::Generalized {
            symbol,
            forcing,
            r: ic,
            family,
        } => {
            let sol = solve_generalized(symbol, forcing, ic, &r.contour, &r.times, &r.tolerances)
                .map_err(solver)?;
            let family_report = match family {
                Some((fam, count)) => {
                    let (series, rep) = truncated_pole_sum(fam, *count, &r.times).map_err(solver)?;
                    write_file(&opts.out_dir, &r.output.series, series.to_csv_string().as_bytes())?;
                    Some(rep)
                }
                None => None,
            };
            let report = WithFamily {
                report: sol.report(),
                family: family_report,
            };
            (sol.solution().clone(), json(&report), sol.warnings.clone())
        }
        Problem::Invert { transform } => {
            let g = |s| Ok(transform.eval(s)?);
            let inv = bromwich_invert(&g, &r.contour, &r.times).map_err(solver)?;
            let report = json(&InvertReport {
                max_imag: inv.max_imag,
                tail_model: &inv.tail,
                refinement: &inv.refinement,
                warnings: &inv.warnings,
            });
            (inv.solution.clone(), report, inv.warnings.clone())
        }
    };
    let csv = write_file(&opts.out_dir, &r.output.csv, grid.to_csv_string().as_bytes())?;
    let rep = write_file(&opts.out_dir, &r.output.report, &report)?;
    report_warnings(&warnings, opts.quiet);
    if !opts.quiet {
        eprintln!("wrote {} and {}", csv.display(), rep.display());
    }
    Ok(())
}

fn unsupported(message: &str) -> CliError {
    solver(VerifyError::Unsupported(message.into()))
}

/// `verify --config`: the verification report; fails unless the residual
/// is below `verify.tolerance`.
pub fn run_verify(config: &Path, opts: &Options) -> Result<(), CliError> {
    let r = load(config)?;
    let v = &r.verify;
    let Some(symbol) = r.symbol() else {
        return Err(unsupported("an inversion has no equation to verify"));
    };
    let target = if let Some(text) = &v.expr {
        let e = parse_bound(text, "t", &v.params, "verify")?;
        VerifyTarget::Smooth(SmoothVector::new(e).map_err(solver)?)
    } else if let Some(seed) = v.eigenfunction_seed {
        let zeta = find_zero(&symbol.expr, seed.into(), 1e-14).map_err(solver)?;
        if !opts.quiet {
            eprintln!("zero of f: {zeta}");
        }
        let e = parse_expr_in("exp((p + q*I)*t)", "t")
            .expect("fixed expression parses")
            .with_params([("p", zeta.re), ("q", zeta.im)]);
        VerifyTarget::Smooth(SmoothVector::new(e).map_err(solver)?)
    } else {
        match &r.problem {
            Problem::Classical(p) => {
                VerifyTarget::from_solution(&solve_classical_ivp(p, &r.times).map_err(solver)?)
            }
            Problem::Generalized { .. } => {
                return Err(unsupported(
                    "generalized solutions are only known on a grid and need not be \
                     differentiable (e.g. the square wave)",
                ))
            }
            Problem::Invert { .. } => unreachable!("no symbol"),
        }
    };
    let report: VerificationReport =
        verify_target(symbol, &target, &r.forcing(), &r.times, v.n_trunc).map_err(solver)?;
    let path = write_file(&opts.out_dir, &r.output.verify, &json(&report))?;
    report_warnings(&report.warnings, opts.quiet);
    if !opts.quiet {
        eprintln!("residual {:e} (n_trunc = {}), wrote {}", report.residual, report.n_trunc, path.display());
    }
    if !(report.residual < v.tolerance) {
        return Err(CliError::Residual {
            residual: report.residual,
            tolerance: v.tolerance,
        });
    }
    Ok(())
}

/// `invert EXPR`: CSV of `L^-1(EXPR)` on standard output.
pub fn run_invert(
    expr: &str,
    contour: &ContourParams,
    grid: &GridSection,
    out: &mut impl Write,
    quiet: bool,
) -> Result<(), CliError> {
    let e = parse_expr(expr)?;
    if let Some(p) = e.unbound().into_iter().next() {
        return Err(ConfigError {
            path: "EXPR".into(),
            message: format!("parameter `{p}` has no value"),
        }
        .into());
    }
    let contour = contour.validated().map_err(|e| ConfigError {
        path: "contour flags".into(),
        message: e.to_string(),
    })?;
    let times = grid.times("--")?;
    let g = |s| Ok(e.eval(s)?);
    let inv = bromwich_invert(&g, &contour, &times).map_err(solver)?;
    report_warnings(&inv.warnings, quiet);
    out.write_all(inv.solution.to_csv_string().as_bytes())
        .map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
}
