//! Estimates for `A_n` driven by Caputo derivatives anchored at the evaluation point.
//!
//! At `x`, the right derivative `D_{x-}^alpha f` lives on `[a, x]` and the left one
//! `D_{*x}^alpha f` on `[x, b]`. Their moduli and sup norms come from sampled tables
//! (see [`FractionalProfile`]), so every bound here is flagged as estimated.

use std::f64::consts::PI;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::highorder::CRITICAL_TOLERANCE;
use super::{jackson_constant, tail_factor, Bound, Term};
use crate::error::{Error, Result};
use crate::fractional::{caputo_order, FractionalProfile, DEFAULT_QUAD_NODES, DEFAULT_SAMPLES};
use crate::modulus::{uniform_grid, ModulusQuality};
use crate::operators::{ComplexFunctionSpec, FunctionSpec};
use crate::special::gamma;

/// Anchors used for suprema over `x in [a, b]`.
pub const DEFAULT_ANCHORS: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FractionalMode {
    /// Error after removing the Taylor terms `j = 1..N-1`.
    Eq84 { x: f64 },
    /// Plain error at a point where `f^(j)(x) = 0`, `j = 1..N-1`.
    Eq85 { x: f64 },
    /// Plain error at any point.
    Eq86 { x: f64 },
    /// Uniform error.
    Eq87,
    /// Uniform error for `0 < alpha < 1`.
    N1,
    /// Uniform error for `alpha = 1/2`.
    Half,
}

impl FractionalMode {
    pub fn point(&self) -> Option<f64> {
        match *self {
            FractionalMode::Eq84 { x } | FractionalMode::Eq85 { x } | FractionalMode::Eq86 { x } => Some(x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FractionalParts {
    /// `|f^(j)|`, `j = 1..N-1` (pointwise or sup).
    pub derivs: Vec<f64>,
    /// `omega(D_R) + omega(D_L)`, or the sum of their suprema over anchors.
    pub omega: f64,
    /// `||D_R|| (x-a)^alpha + ||D_L|| (b-x)^alpha`, or `sup ||D_R|| + sup ||D_L||`.
    pub norms: f64,
    pub quality: ModulusQuality,
}

impl Add for FractionalParts {
    type Output = FractionalParts;
    fn add(self, o: FractionalParts) -> FractionalParts {
        FractionalParts {
            derivs: self.derivs.iter().zip(&o.derivs).map(|(p, q)| p + q).collect(),
            omega: self.omega + o.omega,
            norms: self.norms + o.norms,
            quality: self.quality.and(o.quality),
        }
    }
}

/// Anchors for a profile serving `mode`.
pub fn anchors_for(mode: FractionalMode, (a, b): (f64, f64), count: usize) -> Vec<f64> {
    match mode.point() {
        Some(x) => vec![x],
        None => uniform_grid(a, b, count.max(2)),
    }
}

pub(crate) fn anchor_index(prof: &FractionalProfile, x: f64) -> Result<usize> {
    prof.anchors
        .iter()
        .position(|t| t.x == x)
        .ok_or_else(|| Error::PreconditionViolated(format!("no Caputo tables anchored at {x}")))
}

/// Ingredients at anchor `i`.
pub(crate) fn anchor_parts(f: &FunctionSpec, prof: &FractionalProfile, i: usize, delta: f64) -> Result<FractionalParts> {
    let order = caputo_order(prof.alpha)?;
    let t = &prof.anchors[i];
    let derivs = (1..order).map(|j| Ok(f.derivative(j)?.eval(t.x).abs())).collect::<Result<Vec<_>>>()?;
    Ok(FractionalParts {
        derivs,
        omega: t.right.modulus(delta).value + t.left.modulus(delta).value,
        norms: t.right.sup() * (t.x - prof.a).powf(prof.alpha) + t.left.sup() * (prof.b - t.x).powf(prof.alpha),
        quality: ModulusQuality::Estimated,
    })
}

/// Ingredients with suprema over all anchors of the profile.
pub(crate) fn uniform_parts(f: &FunctionSpec, prof: &FractionalProfile, delta: f64) -> Result<FractionalParts> {
    let order = caputo_order(prof.alpha)?;
    let (a, b) = (prof.a, prof.b);
    let derivs = (1..order)
        .map(|j| Ok(super::sup_of(f.derivative(j)?, Some((a, b)))?.0))
        .collect::<Result<Vec<_>>>()?;
    let (mut wr, mut wl, mut sr, mut sl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for t in &prof.anchors {
        wr = wr.max(t.right.modulus(delta).value);
        wl = wl.max(t.left.modulus(delta).value);
        sr = sr.max(t.right.sup());
        sl = sl.max(t.left.sup());
    }
    Ok(FractionalParts { derivs, omega: wr + wl, norms: sr + sl, quality: ModulusQuality::Estimated })
}

pub(crate) fn check_vanishing(f: &FunctionSpec, x: f64, order: usize) -> Result<()> {
    for j in 1..order {
        let v = f.derivative(j)?.eval(x);
        if !(v.abs() <= CRITICAL_TOLERANCE) {
            return Err(Error::CriticalPointViolated { order: j, x0: x, value: v });
        }
    }
    Ok(())
}

/// Assembles the right-hand side selected by `mode` from `p`.
pub(crate) fn assemble(p: &FractionalParts, n: u64, beta: f64, alpha: f64, (a, b): (f64, f64), mode: FractionalMode) -> Result<Bound> {
    let tb = tail_factor(n, beta)?;
    let j_const = jackson_constant();
    let g = gamma(alpha + 1.0);
    let nf = n as f64;
    let len = b - a;
    let sum: f64 = p
        .derivs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let j = i + 1;
            let fact: f64 = (1..=j).map(|k| k as f64).product();
            d / fact * (nf.powf(-beta * j as f64) + len.powi(j as i32) * tb)
        })
        .sum();
    let nab = nf.powf(alpha * beta);
    let (modulus, tail, value, lead) = match mode {
        FractionalMode::Eq84 { .. } | FractionalMode::Eq85 { .. } => {
            let (m, t) = (p.omega / nab, tb * p.norms);
            (m, t, j_const / g * (m + t), j_const / g)
        }
        FractionalMode::Eq86 { .. } => {
            let (m, t) = (p.omega / nab, tb * p.norms);
            (m, t, j_const * (sum + (m + t) / g), j_const / g)
        }
        FractionalMode::Eq87 => {
            let (m, t) = (p.omega / nab, tb * (len.powf(alpha) * p.norms));
            (m, t, j_const * (sum + (m + t) / g), j_const / g)
        }
        FractionalMode::N1 => {
            let (m, t) = (p.omega / nab, tb * len.powf(alpha) * p.norms);
            (m, t, j_const / g * (m + t), j_const / g)
        }
        FractionalMode::Half => {
            let (m, t) = (p.omega / nf.powf(0.5 * beta), tb * len.sqrt() * p.norms);
            let k = 2.0 * j_const / PI.sqrt();
            (m, t, k * (m + t), k)
        }
    };
    let sum_term = if matches!(mode, FractionalMode::Eq86 { .. } | FractionalMode::Eq87) { j_const * sum } else { 0.0 };
    Ok(Bound {
        value,
        terms: vec![Term::new("derivatives", sum_term), Term::new("modulus", lead * modulus), Term::new("tail", lead * tail)],
        quality: p.quality,
    })
}

fn check_mode(alpha: f64, mode: FractionalMode) -> Result<usize> {
    let order = caputo_order(alpha)?;
    if order == 0 {
        return Err(Error::PreconditionViolated("fractional order must be positive".into()));
    }
    match mode {
        FractionalMode::N1 if order != 1 => Err(Error::PreconditionViolated(format!("N1 form needs 0 < alpha < 1, got {alpha}"))),
        FractionalMode::Half if alpha != 0.5 => Err(Error::PreconditionViolated(format!("half form needs alpha = 1/2, got {alpha}"))),
        _ => Ok(order),
    }
}

fn parts_for(f: &FunctionSpec, prof: &FractionalProfile, n: u64, beta: f64, mode: FractionalMode, order: usize) -> Result<FractionalParts> {
    let delta = (n as f64).powf(-beta);
    match mode.point() {
        Some(x) => {
            if let FractionalMode::Eq85 { .. } = mode {
                check_vanishing(f, x, order)?;
            }
            anchor_parts(f, prof, anchor_index(prof, x)?, delta)
        }
        None => uniform_parts(f, prof, delta),
    }
}

/// Right-hand side for `mode` using precomputed tables.
pub fn fractional_bound_with(f: &FunctionSpec, prof: &FractionalProfile, n: u64, beta: f64, mode: FractionalMode) -> Result<Bound> {
    let order = check_mode(prof.alpha, mode)?;
    tail_factor(n, beta)?;
    let p = parts_for(f, prof, n, beta, mode, order)?;
    assemble(&p, n, beta, prof.alpha, (prof.a, prof.b), mode)
}

/// Right-hand side for `mode`, building the Caputo tables on the spot.
pub fn fractional_bound(f: &FunctionSpec, n: u64, beta: f64, alpha: f64, a: f64, b: f64, mode: FractionalMode) -> Result<Bound> {
    check_mode(alpha, mode)?;
    tail_factor(n, beta)?;
    let anchors = anchors_for(mode, (a, b), DEFAULT_ANCHORS);
    let prof = FractionalProfile::build(f, alpha, (a, b), &anchors, DEFAULT_SAMPLES, DEFAULT_QUAD_NODES)?;
    fractional_bound_with(f, &prof, n, beta, mode)
}

/// Complex version: only the vanishing-derivative, general pointwise and uniform forms apply.
pub fn fractional_bound_complex_with(
    z: &ComplexFunctionSpec,
    profiles: (&FractionalProfile, &FractionalProfile),
    n: u64,
    beta: f64,
    mode: FractionalMode,
) -> Result<Bound> {
    let (pr, pi) = profiles;
    if !matches!(mode, FractionalMode::Eq85 { .. } | FractionalMode::Eq86 { .. } | FractionalMode::Eq87) {
        return Err(Error::PreconditionViolated(format!("{mode:?} has no complex counterpart")));
    }
    let order = check_mode(pr.alpha, mode)?;
    tail_factor(n, beta)?;
    let p = parts_for(&z.re, pr, n, beta, mode, order)? + parts_for(&z.im, pi, n, beta, mode, order)?;
    assemble(&p, n, beta, pr.alpha, (pr.a, pr.b), mode)
}

/// `K_n = n^beta max_x max(omega(D_R), omega(D_L))` at `delta = n^-beta` along a sweep.
pub fn lipschitz_constants(prof: &FractionalProfile, sweep: &[u64], beta: f64) -> Vec<f64> {
    sweep
        .iter()
        .map(|&n| {
            let nb = (n as f64).powf(beta);
            let delta = 1.0 / nb;
            let w = prof
                .anchors
                .iter()
                .map(|t| t.right.modulus(delta).value.max(t.left.modulus(delta).value))
                .fold(0.0f64, f64::max);
            nb * w
        })
        .collect()
}

/// Whether the constants look bounded: at least three and never growing by more than 1%.
pub fn lipschitz_certified(ks: &[f64]) -> bool {
    ks.len() >= 3 && ks.windows(2).all(|w| w[1] <= 1.01 * w[0])
}
