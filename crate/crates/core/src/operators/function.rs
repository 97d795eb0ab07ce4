use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulus::Shape;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Where a function may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    WholeLine,
}

impl Domain {
    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        match *self {
            Domain::WholeLine => true,
            Domain::Interval { a, b } => {
                let slack = 1e-12 * (b - a).abs().max(1.0);
                a - slack <= lo && hi <= b + slack
            }
        }
    }
}

/// A real function of one real variable, with whatever closed-form
/// knowledge is available about it.
///
/// Cloning is cheap: the callable is shared.
#[derive(Clone)]
pub struct FunctionSpec {
    id: String,
    eval: RealFn,
    domain: Domain,
    clamp: Option<(f64, f64)>,
    window: Option<(f64, f64)>,
    derivatives: Vec<FunctionSpec>,
    shape: Option<Shape>,
    sup_norm: Option<f64>,
}

impl FunctionSpec {
    pub fn new(id: impl Into<String>, domain: Domain, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FunctionSpec {
            id: id.into(),
            eval: Arc::new(f),
            domain,
            clamp: None,
            window: None,
            derivatives: Vec::new(),
            shape: None,
            sup_norm: None,
        }
    }

    /// A function given by a recognised closed form.
    pub fn from_shape(id: impl Into<String>, domain: Domain, shape: Shape) -> Self {
        FunctionSpec::new(id, domain, move |t| shape.eval(t)).with_shape(shape)
    }

    /// Derivatives of orders `1..=derivatives.len()`, in order.
    pub fn with_derivatives(mut self, derivatives: Vec<FunctionSpec>) -> Self {
        self.derivatives = derivatives;
        self
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = Some(shape);
        self
    }

    pub fn with_sup_norm(mut self, sup: f64) -> Self {
        self.sup_norm = Some(sup);
        self
    }

    /// Compact window used for grids when the domain is the whole line.
    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Bounded whole-line extension `t -> f(clamp(t, a, b))` of a function on `[a, b]`.
    ///
    /// Moduli and sup norms of the extension over any set equal those of `f`
    /// over the clamped set, so exact shape knowledge carries over.
    pub fn clamped_extension(&self) -> Result<FunctionSpec> {
        let Domain::Interval { a, b } = self.domain else {
            return Err(Error::PreconditionViolated(format!(
                "`{}` already lives on the whole line",
                self.id
            )));
        };
        let inner = self.eval.clone();
        Ok(FunctionSpec {
            id: self.id.clone(),
            eval: Arc::new(move |t| inner(t.clamp(a, b))),
            domain: Domain::WholeLine,
            clamp: Some((a, b)),
            window: Some((a, b)),
            derivatives: Vec::new(),
            shape: self.shape,
            sup_norm: self.sup_norm,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn shape(&self) -> Option<&Shape> {
        self.shape.as_ref()
    }

    pub fn clamp_window(&self) -> Option<(f64, f64)> {
        self.clamp
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Highest derivative order supplied.
    pub fn derivative_order(&self) -> usize {
        self.derivatives.len()
    }

    /// `f^(order)`; order zero is the function itself.
    pub fn derivative(&self, order: usize) -> Result<&FunctionSpec> {
        if order == 0 {
            return Ok(self);
        }
        self.derivatives
            .get(order - 1)
            .ok_or_else(|| Error::MissingDerivative { id: self.id.clone(), order })
    }

    /// Interval on which grids are laid: the domain, the clamp or the declared window.
    pub fn reference_interval(&self) -> Option<(f64, f64)> {
        match self.domain {
            Domain::Interval { a, b } => Some((a, b)),
            Domain::WholeLine => self.clamp.or(self.window),
        }
    }

    fn clamp_set(&self, lo: f64, hi: f64) -> (f64, f64) {
        match self.clamp {
            Some((a, b)) => (lo.clamp(a, b), hi.clamp(a, b)),
            None => (lo, hi),
        }
    }

    /// Closed-form `omega_1(f, delta)` over `[lo, hi]`, if the shape provides one.
    pub fn exact_modulus(&self, delta: f64, lo: f64, hi: f64) -> Option<f64> {
        let shape = self.shape?;
        let (lo, hi) = self.clamp_set(lo, hi);
        if lo >= hi {
            return Some(0.0);
        }
        shape.modulus(delta, lo, hi)
    }

    /// Closed-form `sup |f|` over `[lo, hi]`, if the shape provides one.
    pub fn exact_sup(&self, lo: f64, hi: f64) -> Option<f64> {
        let shape = self.shape?;
        let (lo, hi) = self.clamp_set(lo, hi);
        if lo >= hi {
            return Some(shape.eval(lo).abs());
        }
        shape.sup_abs(lo, hi)
    }

    /// `||f||_inf` over the whole domain: declared, or derived from the shape.
    pub fn sup_norm(&self) -> Option<f64> {
        if self.sup_norm.is_some() {
            return self.sup_norm;
        }
        let (lo, hi) = match self.domain {
            Domain::Interval { a, b } => (a, b),
            Domain::WholeLine => (f64::NEG_INFINITY, f64::INFINITY),
        };
        self.exact_sup(lo, hi)
    }
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("clamp", &self.clamp)
            .field("window", &self.window)
            .field("derivatives", &self.derivatives.len())
            .field("shape", &self.shape)
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

/// `f = re + i im`, both parts on the same domain.
#[derive(Debug, Clone)]
pub struct ComplexFunctionSpec {
    pub re: FunctionSpec,
    pub im: FunctionSpec,
}

impl ComplexFunctionSpec {
    pub fn new(re: FunctionSpec, im: FunctionSpec) -> Result<Self> {
        if re.domain() != im.domain() {
            return Err(Error::PreconditionViolated(format!(
                "real part `{}` and imaginary part `{}` live on different domains",
                re.id(),
                im.id()
            )));
        }
        Ok(ComplexFunctionSpec { re, im })
    }

    pub fn id(&self) -> String {
        format!("({}, {})", self.re.id(), self.im.id())
    }
}
