//! Measures `|Op f - f|` and compares it with the matching right-hand side.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fractional::{
    anchor_index, anchor_parts, assemble as assemble_fractional, fractional_bound_complex_with,
    fractional_bound_with, FractionalMode, FractionalParts, DEFAULT_ANCHORS,
};
use super::highorder::{assemble as assemble_highorder, highorder_bound, highorder_bound_complex, pointwise_derivs, top_parts, HighOrderMode};
use super::{mu1, mu2, mu3, mu3_complex, psi1, psi2, tail_factor, Bound, Term};
use crate::error::{Error, Result};
use crate::fractional::{caputo_order, FractionalProfile, DEFAULT_QUAD_NODES, DEFAULT_SAMPLES};
use crate::modulus::{uniform_grid, ModulusQuality};
use crate::operators::{ComplexFunctionSpec, Domain, Family, FunctionSpec, Operator, OperatorConfig, QuadratureWeights};
use crate::partition::TruncationPolicy;

/// Relative allowance for rounding when comparing error with bound.
pub const VERDICT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    T12,
    T13,
    T14,
    T15,
    T16,
    T30,
    C31,
    C33,
    T36,
    T37,
    T38,
    T39,
    T41,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        TheoremId::T12,
        TheoremId::T13,
        TheoremId::T14,
        TheoremId::T15,
        TheoremId::T16,
        TheoremId::T30,
        TheoremId::C31,
        TheoremId::C33,
        TheoremId::T36,
        TheoremId::T37,
        TheoremId::T38,
        TheoremId::T39,
        TheoremId::T41,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T12 => "T12",
            TheoremId::T13 => "T13",
            TheoremId::T14 => "T14",
            TheoremId::T15 => "T15",
            TheoremId::T16 => "T16",
            TheoremId::T30 => "T30",
            TheoremId::C31 => "C31",
            TheoremId::C33 => "C33",
            TheoremId::T36 => "T36",
            TheoremId::T37 => "T37",
            TheoremId::T38 => "T38",
            TheoremId::T39 => "T39",
            TheoremId::T41 => "T41",
        }
    }

    /// Whether the statement is about complex-valued functions.
    pub fn is_complex(self) -> bool {
        matches!(self, TheoremId::T36 | TheoremId::T37 | TheoremId::T38 | TheoremId::T39 | TheoremId::T41)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown theorem id `{s}`"))
    }
}

/// How a high-order statement is probed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum HighOrderCheck {
    /// Pointwise bound at every grid point.
    Pointwise,
    /// Uniform bound against the grid supremum.
    Sup,
    /// Specialised bound at a point where `f^(j)` vanishes for `j = 1..=N`.
    Critical { x0: f64 },
}

/// How a fractional statement is probed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum FractionalCheck {
    /// Taylor-corrected error at every anchor.
    Eq84,
    /// Plain error where `f^(j)` vanishes for `j = 1..N-1`: at `x0`, or at every anchor when `N = 1`.
    Eq85 { x0: Option<f64> },
    /// Plain error at every anchor.
    Eq86,
    /// Uniform error.
    Eq87,
}

impl FractionalCheck {
    fn name(&self) -> &'static str {
        match self {
            FractionalCheck::Eq84 => "eq84",
            FractionalCheck::Eq85 { .. } => "eq85",
            FractionalCheck::Eq86 => "eq86",
            FractionalCheck::Eq87 => "eq87",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem")]
pub enum Statement {
    T12,
    T13,
    T14,
    T15,
    T16 { order: usize, check: HighOrderCheck },
    T30 { alpha: f64, check: FractionalCheck },
    C31 { alpha: f64 },
    C33,
    T36,
    T37,
    T38 { order: usize, check: HighOrderCheck },
    T39 { alpha: f64, check: FractionalCheck },
    T41,
}

impl Statement {
    pub fn id(&self) -> TheoremId {
        match self {
            Statement::T12 => TheoremId::T12,
            Statement::T13 => TheoremId::T13,
            Statement::T14 => TheoremId::T14,
            Statement::T15 => TheoremId::T15,
            Statement::T16 { .. } => TheoremId::T16,
            Statement::T30 { .. } => TheoremId::T30,
            Statement::C31 { .. } => TheoremId::C31,
            Statement::C33 => TheoremId::C33,
            Statement::T36 => TheoremId::T36,
            Statement::T37 => TheoremId::T37,
            Statement::T38 { .. } => TheoremId::T38,
            Statement::T39 { .. } => TheoremId::T39,
            Statement::T41 => TheoremId::T41,
        }
    }

    /// Short description of the parameters, empty when there are none.
    pub fn variant(&self) -> String {
        let ho = |order: &usize, check: &HighOrderCheck| match check {
            HighOrderCheck::Pointwise => format!("N={order} pointwise"),
            HighOrderCheck::Sup => format!("N={order} sup"),
            HighOrderCheck::Critical { x0 } => format!("N={order} critical x0={x0}"),
        };
        let fr = |alpha: &f64, check: &FractionalCheck| match check {
            FractionalCheck::Eq85 { x0: Some(x0) } => format!("frac{alpha} eq85 x0={x0}"),
            c => format!("frac{alpha} {}", c.name()),
        };
        match self {
            Statement::T16 { order, check } | Statement::T38 { order, check } => ho(order, check),
            Statement::T30 { alpha, check } | Statement::T39 { alpha, check } => fr(alpha, check),
            Statement::C31 { alpha } => format!("frac{alpha}"),
            Statement::C33 => "frac0.5".into(),
            _ => String::new(),
        }
    }

    pub fn families(&self) -> Vec<Family> {
        match self {
            Statement::T13 | Statement::T37 => vec![Family::B],
            Statement::T14 => vec![Family::C],
            Statement::T15 => vec![Family::D],
            Statement::T41 => vec![Family::C, Family::D],
            _ => vec![Family::A],
        }
    }
}

#[derive(Debug, Clone)]
pub enum Subject {
    Real(FunctionSpec),
    Complex(ComplexFunctionSpec),
}

impl Subject {
    pub fn id(&self) -> String {
        match self {
            Subject::Real(f) => f.id().to_string(),
            Subject::Complex(z) => z.id(),
        }
    }

    fn reference_interval(&self) -> Option<(f64, f64)> {
        match self {
            Subject::Real(f) => f.reference_interval(),
            Subject::Complex(z) => z.re.reference_interval(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PointMode {
    Pointwise { x: f64 },
    Sup,
}

impl fmt::Display for PointMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointMode::Pointwise { x } => write!(f, "x={x}"),
            PointMode::Sup => f.write_str("sup"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    InconclusiveEstimated,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::InconclusiveEstimated => "inconclusive-estimated",
            Verdict::Skipped => "skipped",
        })
    }
}

/// `holds` iff `error <= bound (1 + 1e-9)`; an estimated bound cannot certify a violation.
pub fn decide(error: f64, bound: f64, quality: ModulusQuality) -> Verdict {
    if error <= bound * (1.0 + VERDICT_TOLERANCE) {
        Verdict::Holds
    } else if quality == ModulusQuality::Estimated {
        Verdict::InconclusiveEstimated
    } else {
        Verdict::Violated
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySettings {
    /// Base grid size for empirical suprema.
    pub grid_points: usize,
    /// Also evaluate on the nested grid of `2 grid_points - 1` nodes and keep the larger error.
    pub refine: bool,
    pub truncation: TruncationPolicy,
    pub kantorovich_nodes: usize,
    /// Weights of `D_n`.
    pub weights: QuadratureWeights,
    /// `[a, b]` for `A_n`; defaults to the function's reference interval.
    pub interval: Option<(f64, f64)>,
    /// Anchors for suprema over `x` in the fractional statements.
    pub anchors: usize,
    /// Caputo table density: samples per `b - a`.
    pub table_samples: usize,
    pub quad_nodes: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            grid_points: 2048,
            refine: true,
            truncation: TruncationPolicy::default(),
            kantorovich_nodes: crate::operators::DEFAULT_KANTOROVICH_NODES,
            weights: QuadratureWeights::uniform(2),
            interval: None,
            anchors: DEFAULT_ANCHORS,
            table_samples: DEFAULT_SAMPLES,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub variant: String,
    pub function: String,
    pub family: Family,
    pub n: u64,
    pub exponent: f64,
    pub point_mode: PointMode,
    pub empirical_error: f64,
    /// Error on the base grid when the nested refinement was also evaluated.
    pub coarse_error: Option<f64>,
    pub bound: f64,
    pub terms: Vec<Term>,
    pub modulus_quality: ModulusQuality,
    pub verdict: Verdict,
    pub note: Option<String>,
}

impl BoundReport {
    pub fn slack(&self) -> f64 {
        self.bound - self.empirical_error
    }
}

/// One row per `n` in `sweep` (two for statements covering two operator families),
/// in sweep order. Unmet hypotheses and numerical failures produce skipped rows;
/// only a real/complex mismatch between statement and subject is an error.
pub fn verify(st: &Statement, subject: &Subject, sweep: &[u64], exponent: f64, s: &VerifySettings) -> Result<Vec<BoundReport>> {
    let complex = matches!(subject, Subject::Complex(_));
    if st.id().is_complex() != complex {
        return Err(Error::PreconditionViolated(format!(
            "{} is about {} functions, `{}` is not",
            st.id(),
            if complex { "real" } else { "complex" },
            subject.id()
        )));
    }
    let ctx = Context::new(st, subject, s);
    let rows: Vec<Vec<BoundReport>> = sweep
        .par_iter()
        .map(|&n| st.families().into_iter().map(|fam| ctx.row(n, fam, exponent)).collect())
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

struct Context<'a> {
    st: &'a Statement,
    subject: &'a Subject,
    settings: &'a VerifySettings,
    interval: Option<(f64, f64)>,
    /// Whole-line versions for `B_n`, `C_n`, `D_n`.
    line: std::result::Result<Subject, Error>,
    /// Caputo tables for the real part and, for complex subjects, the imaginary part.
    profiles: std::result::Result<Option<(FractionalProfile, Option<FractionalProfile>)>, Error>,
}

fn whole_line(f: &FunctionSpec) -> Result<FunctionSpec> {
    match f.domain() {
        Domain::WholeLine => Ok(f.clone()),
        Domain::Interval { .. } => f.clamped_extension(),
    }
}

impl<'a> Context<'a> {
    fn new(st: &'a Statement, subject: &'a Subject, settings: &'a VerifySettings) -> Self {
        let interval = settings.interval.or_else(|| subject.reference_interval());
        let line = match subject {
            Subject::Real(f) => whole_line(f).map(Subject::Real),
            Subject::Complex(z) => whole_line(&z.re)
                .and_then(|re| Ok(ComplexFunctionSpec { re, im: whole_line(&z.im)? }))
                .map(Subject::Complex),
        };
        let mut ctx = Context { st, subject, settings, interval, line, profiles: Ok(None) };
        ctx.profiles = ctx.build_profiles();
        ctx
    }

    fn fractional_params(&self) -> Option<(f64, FractionalCheck)> {
        match *self.st {
            Statement::T30 { alpha, check } | Statement::T39 { alpha, check } => Some((alpha, check)),
            Statement::C31 { alpha } => Some((alpha, FractionalCheck::Eq87)),
            Statement::C33 => Some((0.5, FractionalCheck::Eq87)),
            _ => None,
        }
    }

    fn build_profiles(&self) -> std::result::Result<Option<(FractionalProfile, Option<FractionalProfile>)>, Error> {
        let Some((alpha, check)) = self.fractional_params() else { return Ok(None) };
        let (a, b) = self.interval()?;
        let anchors = match check {
            FractionalCheck::Eq85 { x0: Some(x0) } => vec![x0],
            _ => uniform_grid(a, b, self.settings.anchors.max(2)),
        };
        let build = |f: &FunctionSpec| {
            FractionalProfile::build(f, alpha, (a, b), &anchors, self.settings.table_samples, self.settings.quad_nodes)
        };
        Ok(Some(match self.subject {
            Subject::Real(f) => (build(f)?, None),
            Subject::Complex(z) => (build(&z.re)?, Some(build(&z.im)?)),
        }))
    }

    fn interval(&self) -> Result<(f64, f64)> {
        self.interval
            .ok_or_else(|| Error::PreconditionViolated(format!("no interval [a, b] for `{}`", self.subject.id())))
    }

    fn base_row(&self, n: u64, family: Family, exponent: f64) -> BoundReport {
        BoundReport {
            theorem: self.st.id(),
            variant: self.st.variant(),
            function: self.subject.id(),
            family,
            n,
            exponent,
            point_mode: PointMode::Sup,
            empirical_error: f64::NAN,
            coarse_error: None,
            bound: f64::NAN,
            terms: Vec::new(),
            modulus_quality: ModulusQuality::Exact,
            verdict: Verdict::Skipped,
            note: None,
        }
    }

    fn row(&self, n: u64, family: Family, exponent: f64) -> BoundReport {
        let mut row = self.base_row(n, family, exponent);
        if let Err(e) = tail_factor(n, exponent) {
            let t = (n as f64).powf(1.0 - exponent);
            row.note = Some(match e {
                Error::PreconditionViolated(_) if exponent > 0.0 && exponent < 1.0 => {
                    format!("hypothesis n^(1-{exponent}) >= 3 fails: {t:.4} < 3")
                }
                e => e.to_string(),
            });
            return row;
        }
        match self.measure(n, family, exponent) {
            Ok(m) => {
                if !m.error.is_finite() || !m.bound.value.is_finite() {
                    row.note = Some(format!("non-finite error {} or bound {}", m.error, m.bound.value));
                    return row;
                }
                row.verdict = decide(m.error, m.bound.value, m.bound.quality);
                row.point_mode = m.point;
                row.empirical_error = m.error;
                row.coarse_error = m.coarse;
                row.bound = m.bound.value;
                row.terms = m.bound.terms;
                row.modulus_quality = m.bound.quality;
            }
            Err(e) => row.note = Some(e.to_string()),
        }
        row
    }

    fn operator(&self, n: u64, family: Family) -> Result<Operator> {
        let s = self.settings;
        let cfg = match family {
            Family::A => {
                let (a, b) = self.interval()?;
                OperatorConfig::a(n, a, b)
            }
            Family::B => OperatorConfig::b(n),
            Family::C => OperatorConfig::c(n),
            Family::D => OperatorConfig::d(n, s.weights.clone()),
        };
        Operator::new(cfg.with_truncation(s.truncation).with_kantorovich_nodes(s.kantorovich_nodes))
    }

    /// Subject as seen by `family`, plus the interval the grid covers.
    fn probe(&self, n: u64, family: Family) -> Result<Probe<'_>> {
        let op = self.operator(n, family)?;
        let (subject, span) = match family {
            Family::A => (self.subject, self.interval()?),
            _ => {
                let line = self.line.as_ref().map_err(Clone::clone)?;
                let span = line
                    .reference_interval()
                    .ok_or_else(|| Error::PreconditionViolated(format!("no window for `{}`", line.id())))?;
                (line, span)
            }
        };
        match subject {
            Subject::Real(f) => op.admit(f)?,
            Subject::Complex(z) => {
                op.admit(&z.re)?;
                op.admit(&z.im)?;
            }
        }
        Ok(Probe { op, subject, span })
    }

    fn grid(&self, span: (f64, f64)) -> Vec<f64> {
        let g = self.settings.grid_points.max(2);
        uniform_grid(span.0, span.1, if self.settings.refine { 2 * g - 1 } else { g })
    }

    fn measure(&self, n: u64, family: Family, exponent: f64) -> Result<Measurement> {
        let alpha = exponent;
        match (*self.st, self.subject) {
            (Statement::T12, Subject::Real(f)) => {
                let (a, b) = self.interval()?;
                self.uniform(n, family, mu1(f, n, alpha, a, b)?)
            }
            (Statement::T13, _) | (Statement::T14, _) | (Statement::T15, _) => {
                let Ok(Subject::Real(g)) = &self.line else { return Err(self.line_error()) };
                let bound = if family == Family::B { mu2(g, n, alpha)? } else { mu3(g, n, alpha)? };
                self.uniform(n, family, bound)
            }
            (Statement::T36, Subject::Complex(z)) => {
                let (a, b) = self.interval()?;
                self.uniform(n, family, psi1(z, n, alpha, a, b)?)
            }
            (Statement::T37, _) | (Statement::T41, _) => {
                let Ok(Subject::Complex(w)) = &self.line else { return Err(self.line_error()) };
                let bound = if family == Family::B { psi2(w, n, alpha)? } else { mu3_complex(w, n, alpha)? };
                self.uniform(n, family, bound)
            }
            (Statement::T16 { order, check }, _) | (Statement::T38 { order, check }, _) => {
                self.highorder(n, alpha, order, check)
            }
            (Statement::T30 { check, .. }, _) | (Statement::T39 { check, .. }, _) => self.fractional(n, exponent, check, None),
            (Statement::C31 { .. }, _) => self.fractional(n, exponent, FractionalCheck::Eq87, Some(FractionalMode::N1)),
            (Statement::C33, _) => self.fractional(n, exponent, FractionalCheck::Eq87, Some(FractionalMode::Half)),
            _ => Err(Error::PreconditionViolated("statement does not apply to this subject".into())),
        }
    }

    fn line_error(&self) -> Error {
        match &self.line {
            Err(e) => e.clone(),
            Ok(_) => Error::PreconditionViolated("subject kind mismatch".into()),
        }
    }

    fn uniform(&self, n: u64, family: Family, bound: Bound) -> Result<Measurement> {
        let probe = self.probe(n, family)?;
        let xs = self.grid(probe.span);
        let (error, _, coarse) = self.grid_sup(&probe, &xs)?;
        Ok(Measurement { error, coarse, bound, point: PointMode::Sup })
    }

    /// `(max error, argmax, max over the base grid)` on `xs`.
    fn grid_sup(&self, probe: &Probe<'_>, xs: &[f64]) -> Result<(f64, f64, Option<f64>)> {
        let mut best = (f64::NEG_INFINITY, xs[0]);
        let mut coarse = f64::NEG_INFINITY;
        for (i, &x) in xs.iter().enumerate() {
            let e = probe.error(x)?;
            if e.is_nan() {
                return Ok((f64::NAN, x, None));
            }
            if e > best.0 {
                best = (e, x);
            }
            if i % 2 == 0 {
                coarse = coarse.max(e);
            }
        }
        Ok((best.0, best.1, self.settings.refine.then_some(coarse)))
    }

    fn highorder(&self, n: u64, alpha: f64, order: usize, check: HighOrderCheck) -> Result<Measurement> {
        let (a, b) = self.interval()?;
        let probe = self.probe(n, Family::A)?;
        match check {
            HighOrderCheck::Sup => {
                let bound = match self.subject {
                    Subject::Real(f) => highorder_bound(f, n, alpha, a, b, order, HighOrderMode::Sup)?,
                    Subject::Complex(z) => highorder_bound_complex(z, n, alpha, a, b, order, HighOrderMode::Sup)?,
                };
                let xs = self.grid((a, b));
                let (error, _, coarse) = self.grid_sup(&probe, &xs)?;
                Ok(Measurement { error, coarse, bound, point: PointMode::Sup })
            }
            HighOrderCheck::Critical { x0 } => {
                let mode = HighOrderMode::Critical { x0 };
                let bound = match self.subject {
                    Subject::Real(f) => highorder_bound(f, n, alpha, a, b, order, mode)?,
                    Subject::Complex(z) => highorder_bound_complex(z, n, alpha, a, b, order, mode)?,
                };
                Ok(Measurement { error: probe.error(x0)?, coarse: None, bound, point: PointMode::Pointwise { x: x0 } })
            }
            HighOrderCheck::Pointwise => {
                let base = match self.subject {
                    Subject::Real(f) => top_parts(f, n, alpha, (a, b), order)?,
                    Subject::Complex(z) => top_parts(&z.re, n, alpha, (a, b), order)? + top_parts(&z.im, n, alpha, (a, b), order)?,
                };
                let mut worst = Worst::default();
                for x in self.grid((a, b)) {
                    let mut p = base.clone();
                    p.derivs = match self.subject {
                        Subject::Real(f) => pointwise_derivs(f, x, order)?,
                        Subject::Complex(z) => {
                            let (r, i) = (pointwise_derivs(&z.re, x, order)?, pointwise_derivs(&z.im, x, order)?);
                            r.iter().zip(&i).map(|(p, q)| p + q).collect()
                        }
                    };
                    let bound = assemble_highorder(&p, n, alpha, (a, b), order)?;
                    worst.offer(x, probe.error(x)?, bound);
                }
                worst.finish()
            }
        }
    }

    fn fractional(&self, n: u64, beta: f64, check: FractionalCheck, uniform: Option<FractionalMode>) -> Result<Measurement> {
        let (a, b) = self.interval()?;
        let profiles = self.profiles.as_ref().map_err(Clone::clone)?;
        let (pr, pi) = profiles.as_ref().expect("fractional statement has profiles");
        let alpha = pr.alpha;
        let order = caputo_order(alpha)?;
        let probe = self.probe(n, Family::A)?;
        let bound_at = |mode: FractionalMode| -> Result<Bound> {
            match self.subject {
                Subject::Real(f) => fractional_bound_with(f, pr, n, beta, mode),
                Subject::Complex(z) => fractional_bound_complex_with(z, (pr, pi.as_ref().expect("imaginary profile")), n, beta, mode),
            }
        };
        if check == FractionalCheck::Eq84 && matches!(self.subject, Subject::Complex(_)) {
            return Err(Error::PreconditionViolated("the Taylor-corrected form has no complex counterpart".into()));
        }
        match check {
            FractionalCheck::Eq87 => {
                let bound = bound_at(uniform.unwrap_or(FractionalMode::Eq87))?;
                let xs = self.grid((a, b));
                let (error, _, coarse) = self.grid_sup(&probe, &xs)?;
                Ok(Measurement { error, coarse, bound, point: PointMode::Sup })
            }
            FractionalCheck::Eq85 { x0 } => {
                if x0.is_none() && order > 1 {
                    return Err(Error::PreconditionViolated(format!(
                        "vanishing-derivative form with N = {order} needs an explicit x0"
                    )));
                }
                let mut worst = Worst::default();
                for t in &pr.anchors {
                    let bound = bound_at(FractionalMode::Eq85 { x: t.x })?;
                    worst.offer(t.x, probe.error(t.x)?, bound);
                }
                worst.finish()
            }
            FractionalCheck::Eq86 => {
                let mut worst = Worst::default();
                for t in &pr.anchors {
                    let bound = bound_at(FractionalMode::Eq86 { x: t.x })?;
                    worst.offer(t.x, probe.error(t.x)?, bound);
                }
                worst.finish()
            }
            FractionalCheck::Eq84 => {
                let Subject::Real(f) = self.subject else { unreachable!() };
                let delta = (n as f64).powf(-beta);
                let mut worst = Worst::default();
                for t in &pr.anchors {
                    let x = t.x;
                    let mut lhs = probe.op.eval_admitted(f, x)? - f.eval(x);
                    let mut fact = 1.0;
                    for j in 1..order {
                        fact *= j as f64;
                        let ji = j as i32;
                        let mono = FunctionSpec::new("taylor", Domain::Interval { a, b }, move |s| (s - x).powi(ji));
                        lhs -= f.derivative(j)?.eval(x) / fact * probe.op.eval_admitted(&mono, x)?;
                    }
                    let mut p: FractionalParts = anchor_parts(f, pr, anchor_index(pr, x)?, delta)?;
                    p.derivs.clear();
                    let bound = assemble_fractional(&p, n, beta, alpha, (a, b), FractionalMode::Eq84 { x })?;
                    worst.offer(x, lhs.abs(), bound);
                }
                worst.finish()
            }
        }
    }
}

struct Probe<'a> {
    op: Operator,
    subject: &'a Subject,
    span: (f64, f64),
}

impl Probe<'_> {
    /// `|Op f(x) - f(x)|`, the complex modulus for complex subjects.
    fn error(&self, x: f64) -> Result<f64> {
        Ok(match self.subject {
            Subject::Real(f) => (self.op.eval_admitted(f, x)? - f.eval(x)).abs(),
            Subject::Complex(z) => {
                let re = self.op.eval_admitted(&z.re, x)? - z.re.eval(x);
                let im = self.op.eval_admitted(&z.im, x)? - z.im.eval(x);
                re.hypot(im)
            }
        })
    }
}

struct Measurement {
    error: f64,
    coarse: Option<f64>,
    bound: Bound,
    point: PointMode,
}

/// Tracks the point with the largest error-to-bound ratio.
#[derive(Default)]
struct Worst {
    best: Option<(f64, f64, f64, Bound)>,
}

impl Worst {
    fn offer(&mut self, x: f64, error: f64, bound: Bound) {
        let ratio = if bound.value > 0.0 {
            error / bound.value
        } else if error > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        if self.best.as_ref().is_none_or(|b| ratio > b.0) {
            self.best = Some((ratio, x, error, bound));
        }
    }

    fn finish(self) -> Result<Measurement> {
        let (_, x, error, bound) = self.best.ok_or_else(|| Error::PreconditionViolated("no evaluation points".into()))?;
        Ok(Measurement { error, coarse: None, bound, point: PointMode::Pointwise { x } })
    }
}
