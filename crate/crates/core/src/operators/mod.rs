//! The quasi-interpolation operators built on the bell density.
//!
//! * `A_n`: normalised sum over the samples `k/n` inside `[a, b]`.
//! * `B_n`: whole-line sum `sum f(k/n) chi(nx - k)`.
//! * `C_n`: as `B_n` with cell averages `n int_{k/n}^{(k+1)/n} f` in place of samples.
//! * `D_n`: as `B_n` with the sub-cell rule `sum_r w_r f(k/n + r/(n theta))`.
//!
//! The whole-line sums are truncated to a window whose excluded mass is below
//! the policy's epsilon, so their truncation error is at most `epsilon * ||f||_inf`.

mod function;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use function::{ComplexFunctionSpec, Domain, FunctionSpec, RealFn};

use crate::error::{Error, Result};
use crate::partition::{centered_sum, windowed_sums, IndexWindow, TruncationPolicy};
use crate::quadrature::Rule;

pub const DEFAULT_KANTOROVICH_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

/// Convex weights `w_0..=w_theta` of the quadrature operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureWeights {
    theta: usize,
    w: Vec<f64>,
}

impl QuadratureWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::InvalidWeights(format!("need theta >= 1, i.e. at least two weights, got {}", w.len())));
        }
        if let Some(bad) = w.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidWeights(format!("weight {bad} is not a finite nonnegative number")));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-15 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(QuadratureWeights { theta: w.len() - 1, w })
    }

    /// All mass on the left sample: `D_n` collapses to `B_n`.
    pub fn degenerate(theta: usize) -> Self {
        let theta = theta.max(1);
        let mut w = vec![0.0; theta + 1];
        w[0] = 1.0;
        QuadratureWeights { theta, w }
    }

    /// Equal weights `1/(theta + 1)`.
    pub fn uniform(theta: usize) -> Self {
        let theta = theta.max(1);
        let mut w = vec![1.0 / (theta + 1) as f64; theta + 1];
        // push rounding into the last weight so the sum is one
        let head: f64 = w[..theta].iter().sum();
        w[theta] = 1.0 - head;
        QuadratureWeights { theta, w }
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

impl Default for QuadratureWeights {
    fn default() -> Self {
        QuadratureWeights::degenerate(1)
    }
}

/// Which operator, at which resolution, with its numerical policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub family: Family,
    pub n: u64,
    pub interval: Option<(f64, f64)>,
    pub truncation: TruncationPolicy,
    pub kantorovich_nodes: usize,
    pub weights: QuadratureWeights,
}

impl OperatorConfig {
    fn base(family: Family, n: u64) -> Self {
        OperatorConfig {
            family,
            n,
            interval: None,
            truncation: TruncationPolicy::default(),
            kantorovich_nodes: DEFAULT_KANTOROVICH_NODES,
            weights: QuadratureWeights::default(),
        }
    }

    pub fn a(n: u64, a: f64, b: f64) -> Self {
        OperatorConfig { interval: Some((a, b)), ..Self::base(Family::A, n) }
    }

    pub fn b(n: u64) -> Self {
        Self::base(Family::B, n)
    }

    pub fn c(n: u64) -> Self {
        Self::base(Family::C, n)
    }

    pub fn d(n: u64, weights: QuadratureWeights) -> Self {
        OperatorConfig { weights, ..Self::base(Family::D, n) }
    }

    /// Config of `family` at resolution `n`, sharing this one's policies.
    pub fn with_family(&self, family: Family) -> Self {
        OperatorConfig { family, ..self.clone() }
    }

    pub fn with_truncation(mut self, truncation: TruncationPolicy) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_kantorovich_nodes(mut self, nodes: usize) -> Self {
        self.kantorovich_nodes = nodes;
        self
    }
}

/// An operator ready for repeated evaluation: validated config plus
/// precomputed window radius and cell rule.
#[derive(Debug, Clone)]
pub struct Operator {
    cfg: OperatorConfig,
    window: Option<IndexWindow>,
    radius: i64,
    cell_rule: Option<Rule>,
}

impl Operator {
    pub fn new(cfg: OperatorConfig) -> Result<Self> {
        if cfg.n == 0 {
            return Err(Error::PreconditionViolated("n must be at least 1".into()));
        }
        let mut window = None;
        let mut radius = 0;
        let mut cell_rule = None;
        match cfg.family {
            Family::A => {
                let (a, b) = cfg
                    .interval
                    .ok_or_else(|| Error::PreconditionViolated("A_n needs an interval [a, b]".into()))?;
                if !(a < b) {
                    return Err(Error::PreconditionViolated(format!("need a < b, got [{a}, {b}]")));
                }
                window = Some(IndexWindow::for_interval(cfg.n, a, b)?);
            }
            Family::B | Family::C | Family::D => {
                radius = cfg.truncation.radius()?;
                if cfg.family == Family::C {
                    if cfg.kantorovich_nodes < 2 {
                        return Err(Error::PreconditionViolated(format!(
                            "kantorovich_nodes = {} must be at least 2",
                            cfg.kantorovich_nodes
                        )));
                    }
                    cell_rule = Some(Rule::gauss_legendre(cfg.kantorovich_nodes));
                }
                if cfg.family == Family::D {
                    QuadratureWeights::new(cfg.weights.w.clone())?;
                }
            }
        }
        Ok(Operator { cfg, window, radius, cell_rule })
    }

    pub fn config(&self) -> &OperatorConfig {
        &self.cfg
    }

    pub fn family(&self) -> Family {
        self.cfg.family
    }

    pub fn n(&self) -> u64 {
        self.cfg.n
    }

    /// Checks the function against the family's requirements once, so
    /// that a sweep over `x` need not repeat it.
    pub fn admit(&self, f: &FunctionSpec) -> Result<()> {
        match self.cfg.family {
            Family::A => {
                let (a, b) = self.cfg.interval.expect("validated");
                if !f.domain().contains(a, b) {
                    return Err(Error::IntervalViolation { id: f.id().to_string(), lo: a, hi: b });
                }
            }
            Family::B | Family::C | Family::D => {
                if f.domain() != Domain::WholeLine {
                    return Err(Error::IntervalViolation {
                        id: f.id().to_string(),
                        lo: f64::NEG_INFINITY,
                        hi: f64::INFINITY,
                    });
                }
                // a clamped extension of a continuous function on a compact interval is bounded
                if f.clamp_window().is_none() && !f.sup_norm().is_some_and(f64::is_finite) {
                    return Err(Error::UnboundedFunction(f.id().to_string()));
                }
            }
        }
        Ok(())
    }

    /// Evaluates at `x` without re-admitting `f`.
    pub fn eval_admitted(&self, f: &FunctionSpec, x: f64) -> Result<f64> {
        let n = self.cfg.n;
        let nf = n as f64;
        match self.cfg.family {
            Family::A => {
                let (a, b) = self.cfg.interval.expect("validated");
                if !(a <= x && x <= b) {
                    return Err(Error::DomainViolation { x, a, b });
                }
                let window = self.window.expect("validated");
                let (num, den) = windowed_sums(x, n, window, |k| f.eval(k as f64 / nf));
                Ok(num / den)
            }
            Family::B => Ok(centered_sum(x, n, self.radius, |k| f.eval(k as f64 / nf))),
            Family::C => {
                let rule = self.cell_rule.as_ref().expect("validated");
                Ok(centered_sum(x, n, self.radius, |k| {
                    let lo = k as f64 / nf;
                    let hi = (k + 1) as f64 / nf;
                    nf * rule.integrate(lo, hi, |t| f.eval(t))
                }))
            }
            Family::D => {
                let w = &self.cfg.weights;
                let step = 1.0 / (nf * w.theta as f64);
                Ok(centered_sum(x, n, self.radius, |k| {
                    let base = k as f64 / nf;
                    let mut acc: Option<f64> = None;
                    for (r, &wr) in w.w.iter().enumerate() {
                        if wr == 0.0 {
                            continue;
                        }
                        let node = if r == 0 { base } else { base + r as f64 * step };
                        let term = wr * f.eval(node);
                        acc = Some(acc.map_or(term, |s| s + term));
                    }
                    acc.unwrap_or(0.0)
                }))
            }
        }
    }

    pub fn eval(&self, f: &FunctionSpec, x: f64) -> Result<f64> {
        self.admit(f)?;
        self.eval_admitted(f, x)
    }

    /// Componentwise: `(Op re)(x) + i (Op im)(x)`.
    pub fn eval_complex(&self, f: &ComplexFunctionSpec, x: f64) -> Result<(f64, f64)> {
        Ok((self.eval(&f.re, x)?, self.eval(&f.im, x)?))
    }
}

fn expect_family(cfg: &OperatorConfig, family: Family) -> Result<()> {
    if cfg.family != family {
        return Err(Error::PreconditionViolated(format!(
            "configuration is for {}_n, not {}_n",
            cfg.family, family
        )));
    }
    Ok(())
}

/// `A_n(f, x)`.
pub fn op_a(f: &FunctionSpec, x: f64, cfg: &OperatorConfig) -> Result<f64> {
    expect_family(cfg, Family::A)?;
    Operator::new(cfg.clone())?.eval(f, x)
}

/// `B_n(f, x)`.
pub fn op_b(f: &FunctionSpec, x: f64, cfg: &OperatorConfig) -> Result<f64> {
    expect_family(cfg, Family::B)?;
    Operator::new(cfg.clone())?.eval(f, x)
}

/// `C_n(f, x)`.
pub fn op_c(f: &FunctionSpec, x: f64, cfg: &OperatorConfig) -> Result<f64> {
    expect_family(cfg, Family::C)?;
    Operator::new(cfg.clone())?.eval(f, x)
}

/// `D_n(f, x)`.
pub fn op_d(f: &FunctionSpec, x: f64, cfg: &OperatorConfig) -> Result<f64> {
    expect_family(cfg, Family::D)?;
    Operator::new(cfg.clone())?.eval(f, x)
}

/// Any family applied to both parts of a complex function.
pub fn op_complex(f: &ComplexFunctionSpec, x: f64, cfg: &OperatorConfig) -> Result<(f64, f64)> {
    Operator::new(cfg.clone())?.eval_complex(f, x)
}
