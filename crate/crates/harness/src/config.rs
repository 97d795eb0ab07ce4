//! Experiment configuration, read from TOML.
//!
//! ```toml
//! schema_version = 1
//!
//! [defaults]                 # every key optional
//! sweep = [9, 16, 81, 256, 1024]
//! exponents = [0.5, 0.8]
//!
//! [[functions]]
//! id = "bump"
//! expr = "exp(-x^2)"         # or: builtin = "sin"
//! domain = [-2.0, 2.0]       # omitted: whole line (then `window` is required)
//!
//! [[functions]]
//! id = "wave"
//! re = "cos"                 # complex: parts name other function ids or builtins
//! im = "sin"
//!
//! [[experiments]]
//! name = "jackson"
//! theorems = ["T12", "T13"]
//! functions = ["linear", "bump"]
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use erfnn::bounds::fractional::DEFAULT_ANCHORS;
use erfnn::bounds::verify::{FractionalCheck, HighOrderCheck};
use erfnn::bounds::{Statement, Subject, TheoremId, VerifySettings};
use erfnn::corpus::{builtin, builtin_expr, BUILTIN_ORDER};
use erfnn::expr::{parse, to_function_spec};
use erfnn::fractional::{DEFAULT_QUAD_NODES, DEFAULT_SAMPLES};
use erfnn::operators::{ComplexFunctionSpec, Domain, FunctionSpec, QuadratureWeights, DEFAULT_KANTOROVICH_NODES};
use erfnn::partition::TruncationPolicy;

pub const SCHEMA_VERSION: u32 = 1;

/// The configuration shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Error)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

fn err(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub functions: Vec<FunctionEntry>,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub partition: PartitionConfig,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    pub sweep: Vec<u64>,
    pub exponents: Vec<f64>,
    pub grid_points: usize,
    pub refine: bool,
    pub truncation_epsilon: f64,
    pub kantorovich_nodes: usize,
    /// Weights `w_0..=w_theta` of `D_n`.
    pub weights: Vec<f64>,
    pub anchors: usize,
    pub table_samples: usize,
    pub quad_nodes: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            sweep: vec![9, 16, 81, 256, 1024],
            exponents: vec![0.5],
            grid_points: 2048,
            refine: true,
            truncation_epsilon: 1e-14,
            kantorovich_nodes: DEFAULT_KANTOROVICH_NODES,
            weights: QuadratureWeights::uniform(2).weights().to_vec(),
            anchors: DEFAULT_ANCHORS,
            table_samples: DEFAULT_SAMPLES,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
    pub id: String,
    pub expr: Option<String>,
    pub builtin: Option<String>,
    pub re: Option<String>,
    pub im: Option<String>,
    pub domain: Option<[f64; 2]>,
    /// Reference window for whole-line functions.
    pub window: Option<[f64; 2]>,
    /// Declared `||f||_inf` on the whole line.
    pub sup_norm: Option<f64>,
    pub derivatives: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub theorems: Vec<String>,
    #[serde(default)]
    pub functions: Vec<String>,
    pub sweep: Option<Vec<u64>>,
    pub exponents: Option<Vec<f64>>,
    /// `[a, b]` for `A_n`; defaults to each function's reference interval.
    pub interval: Option<[f64; 2]>,
    /// Derivative orders for the high-order statements.
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    /// `pointwise`, `sup` or `critical` (with `x0`).
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    pub x0: Option<f64>,
    /// Fractional orders for the fractional statements.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// `eq84`, `eq85`, `eq86`, `eq87`.
    #[serde(default = "default_fractional_checks")]
    pub fractional_checks: Vec<String>,
}

fn default_orders() -> Vec<usize> {
    vec![1]
}
fn default_checks() -> Vec<String> {
    vec!["sup".into()]
}
fn default_alphas() -> Vec<f64> {
    vec![0.5]
}
fn default_fractional_checks() -> Vec<String> {
    vec!["eq86".into(), "eq87".into()]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionConfig {
    pub ns: Vec<u64>,
    pub grid: [f64; 2],
    pub grid_points: usize,
    pub tail_ns: Vec<u64>,
    pub tail_alphas: Vec<f64>,
    /// Random `x` per tail case, drawn with `--seed`.
    pub tail_samples: usize,
    pub deficiency_ns: Vec<u64>,
    pub interval: [f64; 2],
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            ns: vec![1, 2, 7, 50, 311],
            grid: [-8.0, 8.0],
            grid_points: 10_000,
            tail_ns: vec![9, 16, 81, 256, 1024],
            tail_alphas: vec![0.3, 0.5, 0.7, 0.9],
            tail_samples: 100,
            deficiency_ns: vec![10, 100, 1000, 10_000],
            interval: [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// One `verify` call: a statement, a subject and its sweep.
#[derive(Debug, Clone)]
pub struct Job {
    pub experiment: String,
    /// Function id as written in the config.
    pub label: String,
    pub statement: Statement,
    pub subject: Subject,
    pub sweep: Vec<u64>,
    pub exponent: f64,
    pub settings: VerifySettings,
}

#[derive(Debug, Clone)]
enum Entry {
    Real(FunctionSpec),
    Complex(ComplexFunctionSpec),
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| err("<document>", e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(err("schema_version", format!("expected {SCHEMA_VERSION}, found {}", cfg.schema_version)));
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Config, ConfigError> {
        match path {
            None => Config::parse(DEFAULT_CONFIG),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| err(p.display().to_string(), e.to_string()))?;
                Config::parse(&text)
            }
        }
    }

    fn base_settings(&self) -> Result<VerifySettings, ConfigError> {
        let d = &self.defaults;
        let truncation =
            TruncationPolicy::new(d.truncation_epsilon).map_err(|e| err("defaults.truncation_epsilon", e.to_string()))?;
        let weights = QuadratureWeights::new(d.weights.clone()).map_err(|e| err("defaults.weights", e.to_string()))?;
        if d.grid_points < 2 {
            return Err(err("defaults.grid_points", "must be at least 2"));
        }
        if d.kantorovich_nodes < 2 {
            return Err(err("defaults.kantorovich_nodes", "must be at least 2"));
        }
        if d.anchors < 2 || d.table_samples < 2 || d.quad_nodes < 1 {
            return Err(err("defaults", "anchors and table_samples must be at least 2, quad_nodes at least 1"));
        }
        Ok(VerifySettings {
            grid_points: d.grid_points,
            refine: d.refine,
            truncation,
            kantorovich_nodes: d.kantorovich_nodes,
            weights,
            interval: None,
            anchors: d.anchors,
            table_samples: d.table_samples,
            quad_nodes: d.quad_nodes,
        })
    }

    fn registry(&self) -> Result<BTreeMap<String, Entry>, ConfigError> {
        let mut seen = HashSet::new();
        let mut reals: BTreeMap<String, Entry> = BTreeMap::new();
        for (i, f) in self.functions.iter().enumerate() {
            let path = format!("functions[{i}]");
            if !seen.insert(f.id.clone()) {
                return Err(err(format!("{path}.id"), format!("duplicate function id `{}`", f.id)));
            }
            if f.re.is_none() && f.im.is_none() {
                reals.insert(f.id.clone(), Entry::Real(real_function(f, &path)?));
            }
        }
        for (i, f) in self.functions.iter().enumerate() {
            let path = format!("functions[{i}]");
            if let (Some(re), Some(im)) = (&f.re, &f.im) {
                let part = |name: &str, field: &str| -> Result<FunctionSpec, ConfigError> {
                    match reals.get(name) {
                        Some(Entry::Real(s)) => Ok(s.clone()),
                        _ => builtin(name).ok_or_else(|| err(format!("{path}.{field}"), format!("unknown real function `{name}`"))),
                    }
                };
                let z = ComplexFunctionSpec::new(part(re, "re")?, part(im, "im")?)
                    .map_err(|e| err(path.clone(), e.to_string()))?;
                reals.insert(f.id.clone(), Entry::Complex(z));
            } else if f.re.is_some() || f.im.is_some() {
                return Err(err(path, "complex functions need both `re` and `im`"));
            }
        }
        Ok(reals)
    }

    /// Expands every experiment into `verify` jobs, in declaration order.
    pub fn jobs(&self) -> Result<Vec<Job>, ConfigError> {
        let base = self.base_settings()?;
        let registry = self.registry()?;
        let mut jobs = Vec::new();
        for (i, ex) in self.experiments.iter().enumerate() {
            let path = format!("experiments[{i}]");
            let sweep = ex.sweep.clone().unwrap_or_else(|| self.defaults.sweep.clone());
            if sweep.iter().any(|&n| n == 0) {
                return Err(err(format!("{path}.sweep"), "n must be positive"));
            }
            let exponents = ex.exponents.clone().unwrap_or_else(|| self.defaults.exponents.clone());
            if let Some(e) = exponents.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
                return Err(err(format!("{path}.exponents"), format!("{e} is outside (0, 1)")));
            }
            let mut settings = base.clone();
            if let Some([a, b]) = ex.interval {
                if !(a < b) {
                    return Err(err(format!("{path}.interval"), "need a < b"));
                }
                settings.interval = Some((a, b));
            }
            let mut statements = Vec::new();
            for (t, name) in ex.theorems.iter().enumerate() {
                let id: TheoremId = name.parse().map_err(|m: String| err(format!("{path}.theorems[{t}]"), m))?;
                statements.extend(expand(id, ex, &path)?);
            }
            for st in statements {
                for (k, fid) in ex.functions.iter().enumerate() {
                    let subject = lookup(&registry, fid).ok_or_else(|| err(format!("{path}.functions[{k}]"), format!("unknown function `{fid}`")))?;
                    let complex = matches!(subject, Subject::Complex(_));
                    if complex != st.id().is_complex() {
                        let want = if st.id().is_complex() { "complex" } else { "real" };
                        return Err(err(format!("{path}.functions[{k}]"), format!("{} needs a {want} function, `{fid}` is not", st.id())));
                    }
                    for &exponent in &exponents {
                        jobs.push(Job {
                            experiment: ex.name.clone(),
                            label: fid.clone(),
                            statement: st,
                            subject: subject.clone(),
                            sweep: sweep.clone(),
                            exponent,
                            settings: settings.clone(),
                        });
                    }
                }
            }
        }
        Ok(jobs)
    }
}

fn lookup(registry: &BTreeMap<String, Entry>, id: &str) -> Option<Subject> {
    match registry.get(id) {
        Some(Entry::Real(f)) => Some(Subject::Real(f.clone())),
        Some(Entry::Complex(z)) => Some(Subject::Complex(z.clone())),
        None => builtin(id).map(Subject::Real),
    }
}

fn real_function(f: &FunctionEntry, path: &str) -> Result<FunctionSpec, ConfigError> {
    let text = match (&f.expr, &f.builtin) {
        (Some(e), None) => e.clone(),
        (None, Some(b)) => builtin_expr(b).ok_or_else(|| err(format!("{path}.builtin"), format!("unknown builtin `{b}`")))?.to_string(),
        _ => return Err(err(path, "give exactly one of `expr`, `builtin`, or `re` + `im`")),
    };
    let expr = parse(&text).map_err(|e| err(format!("{path}.expr"), e.to_string()))?;
    let domain = match f.domain {
        Some([a, b]) if a < b => Domain::Interval { a, b },
        Some(_) => return Err(err(format!("{path}.domain"), "need a < b")),
        None => Domain::WholeLine,
    };
    // builtins keep their own domain and window unless overridden
    let mut spec = match (&f.builtin, f.domain, f.expr.is_none()) {
        (Some(b), None, true) => builtin(b).expect("checked above").with_id(f.id.clone()),
        _ => to_function_spec(&f.id, &expr, domain, f.derivatives.unwrap_or(BUILTIN_ORDER)),
    };
    if let Some([lo, hi]) = f.window {
        if !(lo < hi) {
            return Err(err(format!("{path}.window"), "need lo < hi"));
        }
        spec = spec.with_window(lo, hi);
    }
    if let Some(s) = f.sup_norm {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(err(format!("{path}.sup_norm"), "must be finite and nonnegative"));
        }
        spec = spec.with_sup_norm(s);
    }
    if spec.reference_interval().is_none() {
        return Err(err(path, "whole-line functions need a `window`"));
    }
    Ok(spec)
}

fn expand(id: TheoremId, ex: &Experiment, path: &str) -> Result<Vec<Statement>, ConfigError> {
    let high = |i: usize, c: &str| -> Result<HighOrderCheck, ConfigError> {
        match c {
            "pointwise" => Ok(HighOrderCheck::Pointwise),
            "sup" => Ok(HighOrderCheck::Sup),
            "critical" => ex
                .x0
                .map(|x0| HighOrderCheck::Critical { x0 })
                .ok_or_else(|| err(format!("{path}.x0"), "critical checks need `x0`")),
            other => Err(err(format!("{path}.checks[{i}]"), format!("unknown check `{other}`"))),
        }
    };
    let frac = |i: usize, c: &str| -> Result<FractionalCheck, ConfigError> {
        match c {
            "eq84" => Ok(FractionalCheck::Eq84),
            "eq85" => Ok(FractionalCheck::Eq85 { x0: ex.x0 }),
            "eq86" => Ok(FractionalCheck::Eq86),
            "eq87" => Ok(FractionalCheck::Eq87),
            other => Err(err(format!("{path}.fractional_checks[{i}]"), format!("unknown check `{other}`"))),
        }
    };
    let alpha_ok = |a: &f64| *a > 0.0 && a.fract() != 0.0;
    if let Some(a) = ex.alphas.iter().find(|a| !alpha_ok(a)) {
        return Err(err(format!("{path}.alphas"), format!("{a} must be positive and not an integer")));
    }
    if ex.orders.contains(&0) {
        return Err(err(format!("{path}.orders"), "orders start at 1"));
    }
    let mut out = Vec::new();
    match id {
        TheoremId::T16 | TheoremId::T38 => {
            for &order in &ex.orders {
                for (i, c) in ex.checks.iter().enumerate() {
                    let check = high(i, c)?;
                    out.push(if id == TheoremId::T16 { Statement::T16 { order, check } } else { Statement::T38 { order, check } });
                }
            }
        }
        TheoremId::T30 | TheoremId::T39 => {
            for &alpha in &ex.alphas {
                for (i, c) in ex.fractional_checks.iter().enumerate() {
                    let check = frac(i, c)?;
                    out.push(if id == TheoremId::T30 { Statement::T30 { alpha, check } } else { Statement::T39 { alpha, check } });
                }
            }
        }
        TheoremId::C31 => out.extend(ex.alphas.iter().map(|&alpha| Statement::C31 { alpha })),
        TheoremId::C33 => out.push(Statement::C33),
        TheoremId::T12 => out.push(Statement::T12),
        TheoremId::T13 => out.push(Statement::T13),
        TheoremId::T14 => out.push(Statement::T14),
        TheoremId::T15 => out.push(Statement::T15),
        TheoremId::T36 => out.push(Statement::T36),
        TheoremId::T37 => out.push(Statement::T37),
        TheoremId::T41 => out.push(Statement::T41),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_expands() {
        let cfg = Config::parse(DEFAULT_CONFIG).unwrap();
        assert!(!cfg.jobs().unwrap().is_empty());
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = "schema_version = 1\n[[experiments]]\nname = \"x\"\ntheorems = [\"T99\"]\nfunctions = [\"sin\"]\n";
        let e = Config::parse(bad).unwrap().jobs().unwrap_err();
        assert_eq!(e.path, "experiments[0].theorems[0]");
        let e = Config::parse("schema_version = 7").unwrap_err();
        assert_eq!(e.path, "schema_version");
        let mixed = "schema_version = 1\n[[experiments]]\nname = \"x\"\ntheorems = [\"T36\"]\nfunctions = [\"sin\"]\n";
        assert_eq!(Config::parse(mixed).unwrap().jobs().unwrap_err().path, "experiments[0].functions[0]");
    }

    #[test]
    fn user_functions() {
        let text = r#"
schema_version = 1
[[functions]]
id = "bump"
expr = "exp(-x^2)"
window = [-2.0, 2.0]
sup_norm = 1.0
[[functions]]
id = "pair"
re = "bump"
im = "sin"
[[experiments]]
name = "x"
theorems = ["T37"]
functions = ["pair"]
"#;
        let jobs = Config::parse(text).unwrap().jobs().unwrap();
        assert_eq!(jobs.len(), 1);
        assert_eq!(jobs[0].label, "pair");
        assert!(matches!(jobs[0].subject, Subject::Complex(_)));
    }
}
