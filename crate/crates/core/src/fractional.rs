//! Left and right Caputo derivatives anchored at an arbitrary point.
//!
//! ```text
//! left:   D_{*x0}^a f(x) = 1/Gamma(N-a) int_{x0}^{x} (x - t)^{N-a-1} f^(N)(t) dt,      x >= x0
//! right:  D_{x0-}^a f(x) = (-1)^N/Gamma(N-a) int_{x}^{x0} (t - x)^{N-a-1} f^(N)(t) dt, x <= x0
//! ```
//!
//! with `N = ceil(a)`, and zero on the other side of the anchor. Substituting
//! `t = x0 + (x - x0) s` turns either integral into `L^{N-a} int_0^1 (1-s)^{N-a-1} g(s) ds`
//! with `L = |x - x0|`, which a Gauss–Jacobi rule handles without loss at the singular end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulus::{sampled_modulus, uniform_grid, ModulusEstimate};
use crate::operators::FunctionSpec;
use crate::quadrature::SingularRule;
use crate::special;

pub const DEFAULT_QUAD_NODES: usize = 32;
pub const DEFAULT_SAMPLES: usize = 4096;

/// `Gamma(nu)` for `nu > 0`.
pub fn gamma_fn(nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::PreconditionViolated(format!("Gamma needs nu > 0, got {nu}")));
    }
    Ok(special::gamma(nu))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `D_{*x0}`, integrating forward from the anchor.
    Left,
    /// `D_{x0-}`, integrating backward to the anchor.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalSpec {
    pub alpha: f64,
    pub order: usize,
    pub anchor: f64,
    pub side: Side,
    pub quad_nodes: usize,
}

impl FractionalSpec {
    /// Rejects negative and positive-integer orders; `alpha = 0` is the identity.
    pub fn new(alpha: f64, anchor: f64, side: Side) -> Result<Self> {
        let order = caputo_order(alpha)?;
        Ok(FractionalSpec { alpha, order, anchor, side, quad_nodes: DEFAULT_QUAD_NODES })
    }

    pub fn with_nodes(mut self, quad_nodes: usize) -> Self {
        self.quad_nodes = quad_nodes;
        self
    }

    pub fn with_anchor(mut self, anchor: f64) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }
}

/// `N = ceil(alpha)`, with integer orders refused.
pub fn caputo_order(alpha: f64) -> Result<usize> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::PreconditionViolated(format!("fractional order {alpha} must be nonnegative")));
    }
    if alpha > 0.0 && alpha.fract() == 0.0 {
        return Err(Error::PreconditionViolated(format!("fractional order {alpha} is an integer")));
    }
    Ok(alpha.ceil() as usize)
}

/// Reusable evaluator for one order: the Jacobi rule and `1/Gamma(N - alpha)` are built once.
#[derive(Debug, Clone)]
pub struct Caputo {
    alpha: f64,
    order: usize,
    scale: f64,
    rule: Option<SingularRule>,
}

impl Caputo {
    pub fn new(alpha: f64, quad_nodes: usize) -> Result<Self> {
        let order = caputo_order(alpha)?;
        if quad_nodes == 0 {
            return Err(Error::PreconditionViolated("quad_nodes must be positive".into()));
        }
        if order == 0 {
            return Ok(Caputo { alpha, order, scale: 1.0, rule: None });
        }
        let nu = order as f64 - alpha;
        Ok(Caputo { alpha, order, scale: 1.0 / special::gamma(nu), rule: Some(SingularRule::new(quad_nodes, nu - 1.0)) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `f^(N)` as required by this order; finite differences are never substituted.
    pub fn kernel_input<'f>(&self, f: &'f FunctionSpec) -> Result<&'f FunctionSpec> {
        f.derivative(self.order)
    }

    /// `D_{*x0} f(x)` given `dn = f^(N)` (or `f` itself when `alpha = 0`).
    pub fn left(&self, dn: &FunctionSpec, x0: f64, x: f64) -> f64 {
        let Some(rule) = &self.rule else { return dn.eval(x) };
        if x <= x0 {
            return 0.0;
        }
        let len = x - x0;
        let nu = self.order as f64 - self.alpha;
        self.scale * len.powf(nu) * rule.apply(|s| dn.eval(x0 + len * s))
    }

    /// `D_{x0-} f(x)` given `dn = f^(N)`.
    pub fn right(&self, dn: &FunctionSpec, x0: f64, x: f64) -> f64 {
        let Some(rule) = &self.rule else { return dn.eval(x) };
        if x >= x0 {
            return 0.0;
        }
        let len = x0 - x;
        let nu = self.order as f64 - self.alpha;
        let sign = if self.order % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.scale * len.powf(nu) * rule.apply(|s| dn.eval(x0 - len * s))
    }

    pub fn eval(&self, dn: &FunctionSpec, side: Side, x0: f64, x: f64) -> f64 {
        match side {
            Side::Left => self.left(dn, x0, x),
            Side::Right => self.right(dn, x0, x),
        }
    }
}

fn expect_side(spec: &FractionalSpec, side: Side) -> Result<()> {
    if spec.side != side {
        return Err(Error::PreconditionViolated(format!("spec is for the {:?} derivative", spec.side)));
    }
    Ok(())
}

/// `D_{*x0}^alpha f(x)`; zero for `x < x0`.
pub fn caputo_left(f: &FunctionSpec, spec: &FractionalSpec, x: f64) -> Result<f64> {
    expect_side(spec, Side::Left)?;
    let c = Caputo::new(spec.alpha, spec.quad_nodes)?;
    Ok(c.left(c.kernel_input(f)?, spec.anchor, x))
}

/// `D_{x0-}^alpha f(x)`; zero for `x > x0`.
pub fn caputo_right(f: &FunctionSpec, spec: &FractionalSpec, x: f64) -> Result<f64> {
    expect_side(spec, Side::Right)?;
    let c = Caputo::new(spec.alpha, spec.quad_nodes)?;
    Ok(c.right(c.kernel_input(f)?, spec.anchor, x))
}

/// Sampled Caputo derivative on a sub-interval on the anchor's side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaputoTable {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl CaputoTable {
    pub fn build(c: &Caputo, f: &FunctionSpec, side: Side, x0: f64, sub: (f64, f64), samples: usize) -> Result<Self> {
        check_sub(side, x0, sub)?;
        let dn = c.kernel_input(f)?;
        if sub.1 <= sub.0 {
            let v = c.eval(dn, side, x0, sub.0);
            return Ok(CaputoTable { xs: vec![sub.0], values: vec![v] });
        }
        let xs = uniform_grid(sub.0, sub.1, samples.max(2));
        let values = xs.iter().map(|&x| c.eval(dn, side, x0, x)).collect();
        Ok(CaputoTable { xs, values })
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid `omega_1` with the every-other-node subgrid as the refinement certificate.
    pub fn modulus(&self, delta: f64) -> ModulusEstimate {
        if self.xs.len() < 3 {
            let v = sampled_modulus(&self.xs, &self.values, delta);
            return ModulusEstimate::estimated(v, v);
        }
        let fine = sampled_modulus(&self.xs, &self.values, delta);
        let (cx, cy): (Vec<f64>, Vec<f64>) = self.xs.iter().zip(&self.values).step_by(2).map(|(x, y)| (*x, *y)).unzip();
        ModulusEstimate::estimated(sampled_modulus(&cx, &cy, delta), fine)
    }
}

fn check_sub(side: Side, x0: f64, (lo, hi): (f64, f64)) -> Result<()> {
    let ok = lo <= hi
        && match side {
            Side::Left => lo >= x0,
            Side::Right => hi <= x0,
        };
    if !ok {
        return Err(Error::PreconditionViolated(format!(
            "[{lo}, {hi}] is not on the {side:?} side of the anchor {x0}"
        )));
    }
    Ok(())
}

/// Grid supremum of `|D^alpha f|` over `sub` (a lower estimate of the true supremum).
pub fn caputo_sup_norm(f: &FunctionSpec, spec: &FractionalSpec, sub: (f64, f64), samples: usize) -> Result<f64> {
    let c = Caputo::new(spec.alpha, spec.quad_nodes)?;
    Ok(CaputoTable::build(&c, f, spec.side, spec.anchor, sub, samples)?.sup())
}

/// `omega_1(D^alpha f, delta)` over `sub`, estimated from a sampled table.
pub fn caputo_modulus(f: &FunctionSpec, spec: &FractionalSpec, delta: f64, sub: (f64, f64)) -> Result<ModulusEstimate> {
    if !(delta > 0.0) {
        return Err(Error::PreconditionViolated(format!("delta = {delta} must be positive")));
    }
    let c = Caputo::new(spec.alpha, spec.quad_nodes)?;
    Ok(CaputoTable::build(&c, f, spec.side, spec.anchor, sub, DEFAULT_SAMPLES)?.modulus(delta))
}

/// Both one-sided derivative tables anchored at one point `x` of `[a, b]`:
/// the right derivative on `[a, x]` and the left one on `[x, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorTables {
    pub x: f64,
    pub right: CaputoTable,
    pub left: CaputoTable,
}

/// Anchor tables across `[a, b]` for one function and order, independent of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalProfile {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub anchors: Vec<AnchorTables>,
}

impl FractionalProfile {
    /// Tables at each anchor, sampled with spacing `(b - a) / samples`.
    pub fn build(f: &FunctionSpec, alpha: f64, (a, b): (f64, f64), anchors: &[f64], samples: usize, quad_nodes: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::PreconditionViolated(format!("need a < b, got [{a}, {b}]")));
        }
        if let Some(x) = anchors.iter().find(|x| !(a <= **x && **x <= b)) {
            return Err(Error::DomainViolation { x: *x, a, b });
        }
        let c = Caputo::new(alpha, quad_nodes)?;
        c.kernel_input(f)?;
        let h = (b - a) / samples.max(1) as f64;
        let points = |len: f64| ((len / h).ceil() as usize + 1).max(2);
        let anchors = anchors
            .par_iter()
            .map(|&x| {
                Ok(AnchorTables {
                    x,
                    right: CaputoTable::build(&c, f, Side::Right, x, (a, x), points(x - a))?,
                    left: CaputoTable::build(&c, f, Side::Left, x, (x, b), points(b - x))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FractionalProfile { alpha, a, b, anchors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulus::Shape;
    use crate::operators::Domain;

    fn power(p: u32, shift: f64) -> FunctionSpec {
        let mut shape = Shape::Power { coeff: 1.0, shift, exponent: p };
        let mut ds = Vec::new();
        for _ in 0..=p {
            shape = shape.derivative().unwrap();
            ds.push(FunctionSpec::from_shape("d", Domain::WholeLine, shape));
        }
        FunctionSpec::from_shape("p", Domain::WholeLine, Shape::Power { coeff: 1.0, shift, exponent: p }).with_derivatives(ds)
    }

    #[test]
    fn gamma_fn_domain() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn integer_orders_rejected() {
        assert!(FractionalSpec::new(2.0, 0.0, Side::Left).is_err());
        assert!(FractionalSpec::new(-0.5, 0.0, Side::Left).is_err());
        assert_eq!(FractionalSpec::new(1.5, 0.0, Side::Left).unwrap().order, 2);
        // alpha = 0 is the identity
        let f = power(2, 0.0);
        let s = FractionalSpec::new(0.0, 0.0, Side::Left).unwrap();
        assert_eq!(caputo_left(&f, &s, 0.7).unwrap(), 0.7f64.powi(2));
    }

    #[test]
    fn monomial_identity_left_and_right() {
        let x0 = 0.3;
        for &alpha in &[0.5f64, 1.5, 2.5] {
            let n = alpha.ceil() as u32;
            for p in n..=n + 2 {
                let g = special::gamma(p as f64 + 1.0) / special::gamma(p as f64 + 1.0 - alpha);
                let f = power(p, x0);
                let spec = FractionalSpec::new(alpha, x0, Side::Left).unwrap();
                let v = caputo_left(&f, &spec, 1.1).unwrap();
                let want = g * 0.8f64.powf(p as f64 - alpha);
                assert!((v - want).abs() <= 1e-12 * (1.0 + want.abs()), "left a={alpha} p={p}: {v} vs {want}");
                // right: (x0 - t)^p = (-1)^p (t - x0)^p
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                let spec = spec.with_side(Side::Right);
                let v = sign * caputo_right(&f, &spec, -0.4).unwrap();
                let want = g * 0.7f64.powf(p as f64 - alpha);
                assert!((v - want).abs() <= 1e-12 * (1.0 + want.abs()), "right a={alpha} p={p}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn zero_extension_and_anchor_zero() {
        let f = power(3, 0.0);
        let l = FractionalSpec::new(1.5, 0.2, Side::Left).unwrap();
        let r = l.with_side(Side::Right);
        assert_eq!(caputo_left(&f, &l, 0.1).unwrap(), 0.0);
        assert_eq!(caputo_left(&f, &l, 0.2).unwrap(), 0.0);
        assert_eq!(caputo_right(&f, &r, 0.3).unwrap(), 0.0);
        assert_eq!(caputo_right(&f, &r, 0.2).unwrap(), 0.0);
        assert!(caputo_left(&f, &r, 0.3).is_err());
    }

    #[test]
    fn missing_derivative_is_an_error() {
        let f = FunctionSpec::new("g", Domain::WholeLine, |t| t * t);
        let s = FractionalSpec::new(0.5, 0.0, Side::Left).unwrap();
        assert!(matches!(caputo_left(&f, &s, 1.0), Err(Error::MissingDerivative { order: 1, .. })));
    }

    #[test]
    fn low_degree_polynomials_have_zero_derivative() {
        let f = power(2, 0.0);
        let s = FractionalSpec::new(2.5, 0.0, Side::Left).unwrap();
        assert_eq!(caputo_sup_norm(&f, &s, (0.0, 1.0), 64).unwrap(), 0.0);
        assert_eq!(caputo_modulus(&f, &s, 0.1, (0.0, 1.0)).unwrap().value, 0.0);
    }

    #[test]
    fn profile_tables_cover_both_sides() {
        let f = power(2, 0.0);
        let prof = FractionalProfile::build(&f, 0.5, (0.0, 1.0), &[0.0, 0.5, 1.0], 256, 32).unwrap();
        assert_eq!(prof.anchors.len(), 3);
        assert_eq!(prof.anchors[0].right.xs, vec![0.0]);
        assert_eq!(prof.anchors[1].left.xs.len(), 129);
        assert!(prof.anchors[2].right.sup() > 0.0);
    }
}
