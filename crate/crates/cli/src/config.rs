//! Run configuration: a TOML file deserialized with field paths, then
//! resolved into library objects. Every rejection names the offending field.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use nonlocal_core::expr::{parse_expr_in, AnalyticExpr, GammaRegion, Symbol};
use nonlocal_core::ivp::{GeneralizedIC, IVPProblem, IvpError, Tolerances};
use nonlocal_core::laplace::{uniform_times, ContourParams, ForcingTerm, GridFunction};
use nonlocal_core::residue::{PoleFamily, PoleSpec};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Generalized,
    Classical,
    Invert,
}

/// A real number or `{ re, im }`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

fn default_radius() -> f64 {
    10.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSection {
    pub expr: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// `R_f`, radius of the disk of analyticity.
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// `omega_f`, abscissa of the half-plane of analyticity.
    #[serde(default)]
    pub abscissa: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprSection {
    pub expr: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    pub expr: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Samples `t,re,im` (or `t,value`), relative to the config file.
    pub csv: Option<PathBuf>,
    pub growth: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleSection {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub order: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySection {
    SquareWave { a: f64, phi0: f64, count: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            t_start: 0.0,
            t_end: 10.0,
            n_points: 1001,
        }
    }
}

impl GridSection {
    pub fn times(&self, prefix: &str) -> Result<Vec<f64>, ConfigError> {
        if self.n_points < 2 {
            return Err(ConfigError::at(format!("{prefix}n_points"), "must be at least 2"));
        }
        if !(self.t_start >= 0.0 && self.t_start.is_finite()) {
            return Err(ConfigError::at(format!("{prefix}t_start"), "must be finite and >= 0"));
        }
        if !(self.t_end > self.t_start && self.t_end.is_finite()) {
            return Err(ConfigError::at(format!("{prefix}t_end"), "must be finite and > t_start"));
        }
        Ok(uniform_times(self.t_start, self.t_end, self.n_points))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancesSection {
    pub genericity: f64,
    pub non_entire: f64,
    pub identity: f64,
    pub widder_bound: f64,
    pub widder_order: usize,
}

impl Default for TolerancesSection {
    fn default() -> Self {
        let t = Tolerances::default();
        TolerancesSection {
            genericity: t.genericity,
            non_entire: t.non_entire,
            identity: t.identity,
            widder_bound: t.widder_bound,
            widder_order: t.widder_order,
        }
    }
}

fn default_verify_tolerance() -> f64 {
    1e-10
}

fn default_n_trunc() -> usize {
    nonlocal_core::verify::DEFAULT_TRUNCATION
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Closed form of `phi(t)` to verify instead of the computed solution.
    pub expr: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Verify `e^(zeta t)` for the zero `zeta` of `f` nearest this seed.
    pub eigenfunction_seed: Option<ComplexValue>,
    #[serde(default = "default_verify_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_n_trunc")]
    pub n_trunc: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            expr: None,
            params: BTreeMap::new(),
            eigenfunction_seed: None,
            tolerance: default_verify_tolerance(),
            n_trunc: default_n_trunc(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub verify: PathBuf,
    /// Pole-series comparison, written when a `[family]` is configured.
    pub series: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            csv: "solution.csv".into(),
            report: "report.json".into(),
            verify: "verify.json".into(),
            series: "series.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    pub symbol: Option<SymbolSection>,
    pub forcing: Option<ForcingSection>,
    pub r: Option<ExprSection>,
    #[serde(default, rename = "pole")]
    pub poles: Vec<PoleSection>,
    #[serde(default)]
    pub initial_values: Vec<ComplexValue>,
    pub family: Option<FamilySection>,
    pub transform: Option<ExprSection>,
    #[serde(default)]
    pub contour: ContourParams,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub tolerances: TolerancesSection,
    pub verify: Option<VerifySection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// A configured problem in library terms.
pub enum Problem {
    Generalized {
        symbol: Symbol,
        forcing: ForcingTerm,
        r: GeneralizedIC,
        family: Option<(PoleFamily, usize)>,
    },
    Classical(IVPProblem),
    Invert {
        transform: AnalyticExpr,
    },
}

pub struct Resolved {
    pub problem: Problem,
    pub contour: ContourParams,
    pub times: Vec<f64>,
    pub tolerances: Tolerances,
    pub verify: VerifySection,
    pub output: OutputSection,
}

impl Resolved {
    pub fn symbol(&self) -> Option<&Symbol> {
        match &self.problem {
            Problem::Generalized { symbol, .. } => Some(symbol),
            Problem::Classical(p) => Some(&p.symbol),
            Problem::Invert { .. } => None,
        }
    }

    pub fn forcing(&self) -> ForcingTerm {
        match &self.problem {
            Problem::Generalized { forcing, .. } => forcing.clone(),
            Problem::Classical(p) => p.forcing.clone(),
            Problem::Invert { .. } => ForcingTerm::zero(),
        }
    }
}

/// Parses `text` in variable `var` with `params` bound; any error or
/// unbound parameter is reported at `field`.
pub fn parse_bound(
    text: &str,
    var: &str,
    params: &BTreeMap<String, f64>,
    field: &str,
) -> Result<AnalyticExpr, ConfigError> {
    let e = parse_expr_in(text, var)
        .map_err(|e| ConfigError::at(format!("{field}.expr"), e))?
        .with_params(params.iter().map(|(k, v)| (k.clone(), *v)));
    if let Some(p) = e.unbound().into_iter().next() {
        return Err(ConfigError::at(
            format!("{field}.params"),
            format!("parameter `{p}` has no value"),
        ));
    }
    Ok(e)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::at(path, inner.message().trim())
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::at("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn symbol(&self) -> Result<Symbol, ConfigError> {
        let s = self
            .symbol
            .as_ref()
            .ok_or_else(|| ConfigError::at("symbol", "missing section (required for this kind)"))?;
        let expr = parse_bound(&s.expr, "s", &s.params, "symbol")?;
        let region = GammaRegion::new(s.radius, s.abscissa).map_err(|e| ConfigError::at("symbol.radius", e))?;
        Ok(Symbol::new(expr, region))
    }

    fn forcing(&self, base: &Path) -> Result<ForcingTerm, ConfigError> {
        let Some(f) = &self.forcing else {
            return Ok(ForcingTerm::zero());
        };
        match (&f.expr, &f.csv) {
            (Some(text), None) => {
                let e = parse_bound(text, "t", &f.params, "forcing")?;
                let j = match f.growth {
                    Some(g) => ForcingTerm::with_growth(e, g),
                    None => ForcingTerm::closed_form(e),
                };
                j.map_err(|e| ConfigError::at("forcing.growth", e))
            }
            (None, Some(path)) => {
                let path = base.join(path);
                let file = std::fs::File::open(&path)
                    .map_err(|e| ConfigError::at("forcing.csv", format!("{}: {e}", path.display())))?;
                let grid = GridFunction::read_csv(file).map_err(|e| ConfigError::at("forcing.csv", e))?;
                let growth = f
                    .growth
                    .ok_or_else(|| ConfigError::at("forcing.growth", "required for sampled forcing"))?;
                let bound = f
                    .bound
                    .ok_or_else(|| ConfigError::at("forcing.bound", "required for sampled forcing"))?;
                ForcingTerm::sampled(grid, growth, bound).map_err(|e| ConfigError::at("forcing.bound", e))
            }
            _ => Err(ConfigError::at("forcing", "give exactly one of `expr` and `csv`")),
        }
    }

    fn reject_extra(&self, kind: &str) -> Result<(), ConfigError> {
        let present = [
            ("pole", !self.poles.is_empty()),
            ("initial_values", !self.initial_values.is_empty()),
            ("r", self.r.is_some()),
            ("family", self.family.is_some()),
            ("transform", self.transform.is_some()),
        ];
        let allowed: &[&str] = match kind {
            "generalized" => &["r", "family"],
            "classical" => &["pole", "initial_values"],
            _ => &["transform"],
        };
        for (name, here) in present {
            if here && !allowed.contains(&name) {
                return Err(ConfigError::at(name, format!("not used by kind = \"{kind}\"")));
            }
        }
        Ok(())
    }

    /// Checks every invariant and builds the library objects. Relative
    /// paths inside the config are resolved against `base`.
    pub fn resolve(&self, base: &Path) -> Result<Resolved, ConfigError> {
        let contour = self
            .contour
            .validated()
            .map_err(|e| ConfigError::at("contour", e))?;
        let times = self.grid.times("grid.")?;
        let t = &self.tolerances;
        let tolerances = Tolerances {
            genericity: t.genericity,
            non_entire: t.non_entire,
            identity: t.identity,
            widder_bound: t.widder_bound,
            widder_order: t.widder_order,
        };
        let problem = match self.kind {
            Kind::Generalized => {
                self.reject_extra("generalized")?;
                let r = match &self.r {
                    Some(r) => GeneralizedIC::new(parse_bound(&r.expr, "s", &r.params, "r")?),
                    None => GeneralizedIC::zero(),
                };
                let family = match &self.family {
                    Some(FamilySection::SquareWave { a, phi0, count }) => {
                        if !(*a > 0.0 && a.is_finite()) {
                            return Err(ConfigError::at("family.a", "must be positive"));
                        }
                        if *count == 0 {
                            return Err(ConfigError::at("family.count", "must be at least 1"));
                        }
                        Some((PoleFamily::square_wave(*a, *phi0), *count))
                    }
                    None => None,
                };
                Problem::Generalized {
                    symbol: self.symbol()?,
                    forcing: self.forcing(base)?,
                    r,
                    family,
                }
            }
            Kind::Classical => {
                self.reject_extra("classical")?;
                let mut poles = Vec::with_capacity(self.poles.len());
                for (i, p) in self.poles.iter().enumerate() {
                    poles.push(
                        PoleSpec::new(Complex64::new(p.re, p.im), p.order)
                            .map_err(|e| ConfigError::at(format!("pole[{i}].order"), e))?,
                    );
                }
                let init = self.initial_values.iter().map(|v| Complex64::from(*v)).collect();
                let p = IVPProblem::new(self.symbol()?, self.forcing(base)?, poles, init, contour)
                    .map_err(|e| match e {
                        IvpError::ShapeMismatch { .. } => ConfigError::at("initial_values", e),
                        IvpError::Residue(_) => ConfigError::at("pole", e),
                        other => ConfigError::at("contour.abscissa", other),
                    })?;
                Problem::Classical(p.with_tolerances(tolerances))
            }
            Kind::Invert => {
                self.reject_extra("invert")?;
                let t = self
                    .transform
                    .as_ref()
                    .ok_or_else(|| ConfigError::at("transform", "missing section (required for kind = \"invert\")"))?;
                Problem::Invert {
                    transform: parse_bound(&t.expr, "s", &t.params, "transform")?,
                }
            }
        };
        Ok(Resolved {
            problem,
            contour,
            times,
            tolerances,
            verify: self.verify.clone().unwrap_or_default(),
            output: self.output.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HARMONIC: &str = r#"
kind = "classical"
initial_values = [1.0, 0.0]

[symbol]
expr = "s^2 + 1"

[[pole]]
re = 0.0
im = 1.0
order = 1

[[pole]]
re = 0.0
im = -1.0
order = 1
"#;

    fn resolve(text: &str) -> Result<Resolved, ConfigError> {
        RunConfig::from_toml(text)?.resolve(Path::new("."))
    }

    #[test]
    fn harmonic_resolves_with_defaults() {
        let r = resolve(HARMONIC).unwrap();
        assert_eq!(r.times.len(), 1001);
        assert_eq!(r.contour, ContourParams::default());
        assert!(matches!(r.problem, Problem::Classical(ref p) if p.k() == 2));
    }

    #[test]
    fn missing_order_names_the_field() {
        let text = HARMONIC.replacen("order = 1\n", "", 1);
        let err = resolve(&text).err().unwrap();
        assert_eq!(err.path, "pole[0]");
        assert!(err.message.contains("order"), "{err}");
    }

    #[test]
    fn invariant_violations_name_fields() {
        let cases = [
            (HARMONIC.replace("kind = \"classical\"", "kind = \"both\""), "kind"),
            (format!("{HARMONIC}\n[grid]\nn_points = 1\n"), "grid.n_points"),
            (HARMONIC.replace("s^2 + 1", "s^2 + a"), "symbol.params"),
            (HARMONIC.replace("s^2 + 1", "s^2 +"), "symbol.expr"),
            (HARMONIC.replace("[1.0, 0.0]", "[1.0]"), "initial_values"),
            (format!("{HARMONIC}\n[contour]\nstep = -1.0\n"), "contour"),
            (format!("{HARMONIC}\n[contour]\nstepp = 1.0\n"), "contour"),
            (format!("{HARMONIC}\n[r]\nexpr = \"1\"\n"), "r"),
            (HARMONIC.replacen("order = 1", "order = 0", 1), "pole[0].order"),
        ];
        for (text, field) in cases {
            let err = resolve(&text).err().unwrap_or_else(|| panic!("{field} accepted"));
            assert!(err.path.starts_with(field), "{field}: {err}");
        }
    }

    #[test]
    fn complex_initial_values() {
        let text = HARMONIC.replace("[1.0, 0.0]", "[{ re = 1.0, im = 0.5 }, 0.0]");
        let Problem::Classical(p) = resolve(&text).unwrap().problem else {
            panic!()
        };
        assert_eq!(p.initial_values[0], Complex64::new(1.0, 0.5));
    }
}
