//! Estimates for `A_n` on `C^N` functions, in pointwise, uniform and critical-point form.

use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::{jackson_constant, modulus_of, sup_of, tail_factor, Bound, Term};
use crate::error::{Error, Result};
use crate::modulus::ModulusQuality;
use crate::operators::{ComplexFunctionSpec, FunctionSpec};

/// Tolerance for "the derivative vanishes here".
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum HighOrderMode {
    /// Uses `|f^(j)(x)|`.
    Pointwise { x: f64 },
    /// Uses `||f^(j)||_inf`.
    Sup,
    /// Drops the derivative sum; requires `f^(j)(x0) = 0` for `j = 1..=N`.
    Critical { x0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct HighOrderParts {
    /// `|f^(j)|` for `j = 1..=N`, empty in critical mode.
    pub derivs: Vec<f64>,
    pub omega_n: f64,
    pub sup_n: f64,
    pub quality: ModulusQuality,
}

impl Add for HighOrderParts {
    type Output = HighOrderParts;
    fn add(self, o: HighOrderParts) -> HighOrderParts {
        HighOrderParts {
            derivs: self.derivs.iter().zip(&o.derivs).map(|(p, q)| p + q).collect(),
            omega_n: self.omega_n + o.omega_n,
            sup_n: self.sup_n + o.sup_n,
            quality: self.quality.and(o.quality),
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Modulus and sup norm of `f^(N)` over `[a, b]`, shared by every mode.
pub(crate) fn top_parts(f: &FunctionSpec, n: u64, alpha: f64, (a, b): (f64, f64), order: usize) -> Result<HighOrderParts> {
    if order == 0 {
        return Err(Error::PreconditionViolated("derivative order N must be at least 1".into()));
    }
    for j in 1..order {
        f.derivative(j)?;
    }
    let dn = f.derivative(order)?;
    let m = modulus_of(dn, (n as f64).powf(-alpha), Some((a, b)))?;
    let (s, q) = sup_of(dn, Some((a, b)))?;
    Ok(HighOrderParts { derivs: Vec::new(), omega_n: m.value, sup_n: s, quality: m.quality.and(q) })
}

/// `|f^(j)(x)|`, `j = 1..=order`.
pub(crate) fn pointwise_derivs(f: &FunctionSpec, x: f64, order: usize) -> Result<Vec<f64>> {
    (1..=order).map(|j| Ok(f.derivative(j)?.eval(x).abs())).collect()
}

pub(crate) fn check_critical(f: &FunctionSpec, x0: f64, order: usize) -> Result<()> {
    for j in 1..=order {
        let v = f.derivative(j)?.eval(x0);
        if !(v.abs() <= CRITICAL_TOLERANCE) {
            return Err(Error::CriticalPointViolated { order: j, x0, value: v });
        }
    }
    Ok(())
}

fn mode_parts(f: &FunctionSpec, n: u64, alpha: f64, (a, b): (f64, f64), order: usize, mode: HighOrderMode) -> Result<HighOrderParts> {
    let mut p = top_parts(f, n, alpha, (a, b), order)?;
    match mode {
        HighOrderMode::Pointwise { x } => {
            if !(a <= x && x <= b) {
                return Err(Error::DomainViolation { x, a, b });
            }
            p.derivs = pointwise_derivs(f, x, order)?;
        }
        HighOrderMode::Sup => {
            for j in 1..=order {
                let (s, q) = sup_of(f.derivative(j)?, Some((a, b)))?;
                p.derivs.push(s);
                p.quality = p.quality.and(q);
            }
        }
        HighOrderMode::Critical { x0 } => {
            if !(a <= x0 && x0 <= b) {
                return Err(Error::DomainViolation { x: x0, a, b });
            }
            check_critical(f, x0, order)?;
        }
    }
    Ok(p)
}

/// `J { sum_j d_j / j! [n^{-alpha j} + (b-a)^j tail] + [omega / (n^{alpha N} N!) + sup (b-a)^N / N! * 2 tail] }`
/// where `tail` is [`tail_factor`]; the sum is absent when `derivs` is empty.
pub(crate) fn assemble(p: &HighOrderParts, n: u64, alpha: f64, (a, b): (f64, f64), order: usize) -> Result<Bound> {
    let tb = tail_factor(n, alpha)?;
    let j_const = jackson_constant();
    let len = b - a;
    let nf = n as f64;
    let fact_n = factorial(order);
    let sum: f64 = p
        .derivs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let j = i + 1;
            d / factorial(j) * (nf.powf(-alpha * j as f64) + len.powi(j as i32) * tb)
        })
        .sum();
    let modulus = p.omega_n / (nf.powf(alpha * order as f64) * fact_n);
    let tail = p.sup_n * len.powi(order as i32) / fact_n * (2.0 * tb);
    let block = modulus + tail;
    let value = if p.derivs.is_empty() { j_const * block } else { j_const * (sum + block) };
    Ok(Bound {
        value,
        terms: vec![
            Term::new("derivatives", j_const * sum),
            Term::new("modulus", j_const * modulus),
            Term::new("tail", j_const * tail),
        ],
        quality: p.quality,
    })
}

/// Estimate for `|A_n f - f|` when `f` has `order` continuous derivatives on `[a, b]`.
pub fn highorder_bound(f: &FunctionSpec, n: u64, alpha: f64, a: f64, b: f64, order: usize, mode: HighOrderMode) -> Result<Bound> {
    tail_factor(n, alpha)?;
    let p = mode_parts(f, n, alpha, (a, b), order, mode)?;
    assemble(&p, n, alpha, (a, b), order)
}

/// [`highorder_bound`] for `f = re + i im`, with the parts' ingredients added.
pub fn highorder_bound_complex(
    z: &ComplexFunctionSpec,
    n: u64,
    alpha: f64,
    a: f64,
    b: f64,
    order: usize,
    mode: HighOrderMode,
) -> Result<Bound> {
    tail_factor(n, alpha)?;
    let p = mode_parts(&z.re, n, alpha, (a, b), order, mode)? + mode_parts(&z.im, n, alpha, (a, b), order, mode)?;
    assemble(&p, n, alpha, (a, b), order)
}
