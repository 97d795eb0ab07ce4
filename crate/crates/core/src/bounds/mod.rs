//! Right-hand sides of the Jackson-type error estimates and the machinery that
//! checks them against measured operator error.

use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulus::{omega1, uniform_grid, ModulusEstimate, ModulusQuality, ModulusQuery, DEFAULT_GRID_POINTS};
use crate::operators::{ComplexFunctionSpec, FunctionSpec};
use crate::partition::tail_bound;
use crate::special::chi;

pub mod fractional;
pub mod highorder;
pub mod rate;
pub mod verify;

pub use fractional::{fractional_bound, FractionalMode};
pub use highorder::{highorder_bound, highorder_bound_complex, HighOrderMode};
pub use rate::{fit_rate, RateFit};
pub use verify::{verify, BoundReport, PointMode, Statement, Subject, TheoremId, Verdict, VerifySettings};

/// The published rounding of [`jackson_constant`].
pub const JACKSON_ROUNDED: f64 = 4.019;

/// `1 / chi(1)`, the constant in front of every interval estimate.
pub fn jackson_constant() -> f64 {
    1.0 / chi(1.0)
}

/// `1 / (2 sqrt(pi) (t - 2) e^{(t - 2)^2})`, `t = n^(1 - alpha)`; fails unless `t >= 3`.
pub fn tail_factor(n: u64, alpha: f64) -> Result<f64> {
    tail_bound(n, alpha)
}

/// `1 / (sqrt(pi) (t - 2) e^{(t - 2)^2})`, twice [`tail_factor`].
pub fn tail_weight(n: u64, alpha: f64) -> Result<f64> {
    Ok(2.0 * tail_bound(n, alpha)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

impl Term {
    fn new(label: &str, value: f64) -> Self {
        Term { label: label.into(), value }
    }
}

/// An assembled right-hand side with its labelled summands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub terms: Vec<Term>,
    pub quality: ModulusQuality,
}

/// `omega_1(f, delta)` over `set`, or over the whole line when `set` is `None`.
///
/// On the whole line only closed forms are exact; otherwise the estimate is taken
/// on the function's reference window and flagged as estimated.
pub(crate) fn modulus_of(f: &FunctionSpec, delta: f64, set: Option<(f64, f64)>) -> Result<ModulusEstimate> {
    match set {
        Some((lo, hi)) => omega1(f, &ModulusQuery::new(delta, lo, hi)),
        None => {
            if let Some(v) = f.exact_modulus(delta, f64::NEG_INFINITY, f64::INFINITY) {
                return Ok(ModulusEstimate::exact(v));
            }
            let (lo, hi) = f.reference_interval().ok_or_else(|| no_window(f))?;
            let mut est = omega1(f, &ModulusQuery::new(delta, lo, hi))?;
            est.quality = ModulusQuality::Estimated;
            Ok(est)
        }
    }
}

/// `sup |f|` over `set` (whole line when `None`), with its quality.
pub(crate) fn sup_of(f: &FunctionSpec, set: Option<(f64, f64)>) -> Result<(f64, ModulusQuality)> {
    let exact = match set {
        Some((lo, hi)) => f.exact_sup(lo, hi),
        None => f.sup_norm(),
    };
    if let Some(v) = exact {
        if !v.is_finite() {
            return Err(Error::UnboundedFunction(f.id().to_string()));
        }
        return Ok((v, ModulusQuality::Exact));
    }
    let (lo, hi) = match set {
        Some(s) => s,
        None => f.reference_interval().ok_or_else(|| no_window(f))?,
    };
    let v = uniform_grid(lo, hi, 2 * DEFAULT_GRID_POINTS - 1)
        .into_iter()
        .fold(0.0f64, |m, x| m.max(f.eval(x).abs()));
    Ok((v, ModulusQuality::Estimated))
}

fn no_window(f: &FunctionSpec) -> Error {
    Error::PreconditionViolated(format!("`{}` has neither a closed form nor a reference window", f.id()))
}

/// `omega_1` and sup-norm ingredients; complex bounds add those of the two parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct JacksonParts {
    pub omega: f64,
    pub sup: f64,
    pub quality: ModulusQuality,
}

impl Add for JacksonParts {
    type Output = JacksonParts;
    fn add(self, o: JacksonParts) -> JacksonParts {
        JacksonParts { omega: self.omega + o.omega, sup: self.sup + o.sup, quality: self.quality.and(o.quality) }
    }
}

pub(crate) fn jackson_parts(f: &FunctionSpec, delta: f64, set: Option<(f64, f64)>) -> Result<JacksonParts> {
    let m = modulus_of(f, delta, set)?;
    let (sup, q) = sup_of(f, set)?;
    Ok(JacksonParts { omega: m.value, sup, quality: m.quality.and(q) })
}

/// `scale * [omega + sup * weight]`.
pub(crate) fn assemble_jackson(p: JacksonParts, weight: f64, scale: Option<f64>) -> Bound {
    let inner = p.omega + p.sup * weight;
    let k = scale.unwrap_or(1.0);
    Bound {
        value: scale.map_or(inner, |s| s * inner),
        terms: vec![Term::new("modulus", k * p.omega), Term::new("tail", k * (p.sup * weight))],
        quality: p.quality,
    }
}

fn step(n: u64, alpha: f64) -> f64 {
    (n as f64).powf(-alpha)
}

/// Interval estimate for `A_n`: `J [omega_1(f, n^-alpha) + ||f|| / (sqrt(pi) (t-2) e^{(t-2)^2})]`.
pub fn mu1(f: &FunctionSpec, n: u64, alpha: f64, a: f64, b: f64) -> Result<Bound> {
    let w = tail_weight(n, alpha)?;
    let p = jackson_parts(f, step(n, alpha), Some((a, b)))?;
    Ok(assemble_jackson(p, w, Some(jackson_constant())))
}

/// Whole-line estimate for `B_n`: [`mu1`] without the constant.
pub fn mu2(f: &FunctionSpec, n: u64, alpha: f64) -> Result<Bound> {
    let w = tail_weight(n, alpha)?;
    let p = jackson_parts(f, step(n, alpha), None)?;
    Ok(assemble_jackson(p, w, None))
}

/// Estimate for `C_n` and `D_n`: the modulus step grows to `1/n + n^-alpha`.
pub fn mu3(f: &FunctionSpec, n: u64, alpha: f64) -> Result<Bound> {
    let w = tail_weight(n, alpha)?;
    let p = jackson_parts(f, 1.0 / n as f64 + step(n, alpha), None)?;
    Ok(assemble_jackson(p, w, None))
}

fn complex_parts(z: &ComplexFunctionSpec, delta: f64, set: Option<(f64, f64)>) -> Result<JacksonParts> {
    Ok(jackson_parts(&z.re, delta, set)? + jackson_parts(&z.im, delta, set)?)
}

/// [`mu1`] for `f = re + i im`: moduli and sup norms of the parts are added.
pub fn psi1(z: &ComplexFunctionSpec, n: u64, alpha: f64, a: f64, b: f64) -> Result<Bound> {
    let w = tail_weight(n, alpha)?;
    Ok(assemble_jackson(complex_parts(z, step(n, alpha), Some((a, b)))?, w, Some(jackson_constant())))
}

/// [`mu2`] for complex `f`.
pub fn psi2(z: &ComplexFunctionSpec, n: u64, alpha: f64) -> Result<Bound> {
    let w = tail_weight(n, alpha)?;
    Ok(assemble_jackson(complex_parts(z, step(n, alpha), None)?, w, None))
}

/// [`mu3`] for complex `f`.
pub fn mu3_complex(z: &ComplexFunctionSpec, n: u64, alpha: f64) -> Result<Bound> {
    let w = tail_weight(n, alpha)?;
    Ok(assemble_jackson(complex_parts(z, 1.0 / n as f64 + step(n, alpha), None)?, w, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulus::Shape;
    use crate::operators::Domain;
    use std::f64::consts::PI;

    fn sin() -> FunctionSpec {
        FunctionSpec::from_shape("sin", Domain::WholeLine, Shape::Sinusoid { amp: 1.0, freq: 1.0, phase: 0.0 })
            .with_window(-PI, PI)
    }

    #[test]
    fn constant_value() {
        assert!((jackson_constant() - 4.01879887608445).abs() < 1e-12);
        assert!((jackson_constant() - JACKSON_ROUNDED).abs() < 1e-3);
    }

    #[test]
    fn mu1_linear_example() {
        let f = FunctionSpec::from_shape("t", Domain::Interval { a: 0.0, b: 1.0 }, Shape::Affine { slope: 1.0, intercept: 0.0 });
        let b = mu1(&f, 16, 0.5, 0.0, 1.0).unwrap();
        let want = jackson_constant() * (0.25 + 1.0 / (PI.sqrt() * 2.0 * 4f64.exp()));
        assert!((b.value - want).abs() < 1e-15);
        assert_eq!(b.quality, ModulusQuality::Exact);
    }

    #[test]
    fn mu1_is_constant_times_mu2() {
        let f = sin();
        for n in [9, 16, 81, 256, 1024] {
            let m1 = mu1(&f, n, 0.5, -PI, PI).unwrap();
            let m2 = mu2(&f, n, 0.5).unwrap();
            assert_eq!(m1.value, jackson_constant() * m2.value);
        }
    }

    #[test]
    fn mu2_sin_example() {
        let want = 2.0 * (1.0f64 / 18.0).sin() + 1.0 / (PI.sqrt() * 7.0 * 49f64.exp());
        assert!((mu2(&sin(), 81, 0.5).unwrap().value - want).abs() < 1e-15);
        assert!(mu3(&sin(), 81, 0.5).unwrap().value >= mu2(&sin(), 81, 0.5).unwrap().value);
    }

    #[test]
    fn hypothesis_enforced() {
        assert!(matches!(mu2(&sin(), 4, 0.5), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn zero_imaginary_part_reduces_to_real() {
        let zero = FunctionSpec::from_shape("0", Domain::WholeLine, Shape::Constant { value: 0.0 });
        let z = ComplexFunctionSpec::new(sin(), zero).unwrap();
        for n in [9, 81, 1024] {
            assert_eq!(psi2(&z, n, 0.5).unwrap(), mu2(&sin(), n, 0.5).unwrap());
            assert_eq!(psi1(&z, n, 0.5, -PI, PI).unwrap(), mu1(&sin(), n, 0.5, -PI, PI).unwrap());
            assert_eq!(mu3_complex(&z, n, 0.5).unwrap(), mu3(&sin(), n, 0.5).unwrap());
        }
    }

    #[test]
    fn cos_sin_psi2_example() {
        let cos = FunctionSpec::from_shape("cos", Domain::WholeLine, Shape::Sinusoid { amp: 1.0, freq: 1.0, phase: 0.5 * PI });
        let z = ComplexFunctionSpec::new(cos, sin()).unwrap();
        let s = 2.0 * (1.0f64 / 18.0).sin();
        let want = (s + s) + 2.0 / (PI.sqrt() * 7.0 * 49f64.exp());
        assert!((psi2(&z, 81, 0.5).unwrap().value - want).abs() < 1e-15);
    }
}
