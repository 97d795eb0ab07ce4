//! First modulus of continuity `omega_1(f, delta) = sup |f(x) - f(y)|, |x - y| <= delta`.
//!
//! Known shapes get closed forms. Everything else is estimated on a uniform grid;
//! a grid supremum can only miss pairs, so estimates are lower bounds.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::FunctionSpec;

pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Closed forms with exact moduli and sup norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `value`
    Constant { value: f64 },
    /// `slope x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `coeff (x - shift)^exponent`, `exponent >= 2`
    Power { coeff: f64, shift: f64, exponent: u32 },
    /// `amp sin(freq x + phase)`
    Sinusoid { amp: f64, freq: f64, phase: f64 },
    /// `coeff exp(rate x + shift)`
    Exp { coeff: f64, rate: f64, shift: f64 },
    /// `coeff |slope x + intercept|`
    Abs { coeff: f64, slope: f64, intercept: f64 },
}

impl Shape {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Shape::Constant { value } => value,
            Shape::Affine { slope, intercept } => slope * x + intercept,
            Shape::Power { coeff, shift, exponent } => coeff * (x - shift).powi(exponent as i32),
            Shape::Sinusoid { amp, freq, phase } => amp * (freq * x + phase).sin(),
            Shape::Exp { coeff, rate, shift } => coeff * (rate * x + shift).exp(),
            Shape::Abs { coeff, slope, intercept } => coeff * (slope * x + intercept).abs(),
        }
    }

    /// Interior points of `(lo, hi)` that split it into monotone pieces.
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let p = match *self {
            Shape::Power { shift, exponent, .. } if exponent % 2 == 0 => Some(shift),
            Shape::Abs { slope, intercept, .. } if slope != 0.0 => Some(-intercept / slope),
            _ => None,
        };
        p.into_iter().filter(|&p| lo < p && p < hi).collect()
    }

    fn pieces(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints(lo, hi));
        cuts.push(hi);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Exact `omega_1` over `[lo, hi]`, or `None` where no closed form applies.
    pub fn modulus(&self, delta: f64, lo: f64, hi: f64) -> Option<f64> {
        let h = delta.min(hi - lo);
        match *self {
            Shape::Constant { .. } => Some(0.0),
            Shape::Affine { slope, .. } => Some(slope.abs() * h),
            Shape::Sinusoid { amp, freq, phase } => {
                if amp == 0.0 || freq == 0.0 {
                    return Some(0.0);
                }
                // |sin A - sin B| = 2 |cos((A+B)/2)| |sin((A-B)/2)|: attained when a window of
                // width min(h, pi/|freq|) is centred on a zero of the sine.
                let w = freq.abs();
                let d = h.min(PI / w);
                let value = 2.0 * amp.abs() * (0.5 * w * d).sin();
                if !lo.is_finite() || !hi.is_finite() {
                    return Some(value);
                }
                let (m0, m1) = (lo + 0.5 * d, hi - 0.5 * d);
                let (t0, t1) = {
                    let (p, q) = (freq * m0 + phase, freq * m1 + phase);
                    (p.min(q), p.max(q))
                };
                let k = (t0 / PI).ceil();
                (k * PI <= t1 + 1e-15 * t1.abs().max(1.0)).then_some(value)
            }
            Shape::Power { .. } | Shape::Exp { .. } | Shape::Abs { .. } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return None;
                }
                // Monotone pieces with convex |f'|: the worst window sits at an end of a piece.
                // Windows across a breakpoint (an extremum) are dominated by one-sided ones.
                let mut best: f64 = 0.0;
                for (p, q) in self.pieces(lo, hi) {
                    let hp = h.min(q - p);
                    let left = (self.eval(p + hp) - self.eval(p)).abs();
                    let right = (self.eval(q) - self.eval(q - hp)).abs();
                    best = best.max(left).max(right);
                }
                Some(best)
            }
        }
    }

    /// Exact `sup |f|` over `[lo, hi]`; infinite for unbounded shapes on unbounded sets.
    pub fn sup_abs(&self, lo: f64, hi: f64) -> Option<f64> {
        match *self {
            Shape::Constant { value } => Some(value.abs()),
            Shape::Sinusoid { amp, freq, phase } => {
                if freq == 0.0 {
                    return Some(self.eval(0.0).abs());
                }
                if !lo.is_finite() || !hi.is_finite() {
                    return Some(amp.abs());
                }
                let (p, q) = (freq * lo + phase, freq * hi + phase);
                let (t0, t1) = (p.min(q), p.max(q));
                let k = ((t0 - 0.5 * PI) / PI).ceil();
                if 0.5 * PI + k * PI <= t1 {
                    Some(amp.abs())
                } else {
                    Some(self.eval(lo).abs().max(self.eval(hi).abs()))
                }
            }
            _ => {
                if !lo.is_finite() || !hi.is_finite() {
                    let flat = match *self {
                        Shape::Affine { slope, .. } => slope == 0.0,
                        Shape::Power { coeff, .. } | Shape::Exp { coeff, .. } | Shape::Abs { coeff, .. } => coeff == 0.0,
                        _ => false,
                    };
                    return Some(if flat { self.eval(0.0).abs() } else { f64::INFINITY });
                }
                let mut best = self.eval(lo).abs().max(self.eval(hi).abs());
                for p in self.breakpoints(lo, hi) {
                    best = best.max(self.eval(p).abs());
                }
                Some(best)
            }
        }
    }

    /// Derivative as a shape, where it stays inside the family.
    pub fn derivative(&self) -> Option<Shape> {
        Some(match *self {
            Shape::Constant { .. } => Shape::Constant { value: 0.0 },
            Shape::Affine { slope, .. } => Shape::Constant { value: slope },
            Shape::Power { coeff, shift, exponent } => {
                let c = coeff * exponent as f64;
                if exponent <= 1 {
                    Shape::Constant { value: if exponent == 0 { 0.0 } else { coeff } }
                } else if exponent == 2 {
                    Shape::Affine { slope: c, intercept: -c * shift }
                } else {
                    Shape::Power { coeff: c, shift, exponent: exponent - 1 }
                }
            }
            Shape::Sinusoid { amp, freq, phase } => Shape::Sinusoid { amp: amp * freq, freq, phase: phase + 0.5 * PI },
            Shape::Exp { coeff, rate, shift } => Shape::Exp { coeff: coeff * rate, rate, shift },
            Shape::Abs { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusQuality {
    Exact,
    Estimated,
}

impl std::fmt::Display for ModulusQuality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModulusQuality::Exact => "exact",
            ModulusQuality::Estimated => "estimated",
        })
    }
}

impl ModulusQuality {
    /// Estimated if either input is.
    pub fn and(self, other: ModulusQuality) -> ModulusQuality {
        if self == ModulusQuality::Exact && other == ModulusQuality::Exact {
            ModulusQuality::Exact
        } else {
            ModulusQuality::Estimated
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusQuery {
    pub delta: f64,
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
}

impl ModulusQuery {
    pub fn new(delta: f64, lo: f64, hi: f64) -> Self {
        ModulusQuery { delta, lo, hi, grid_points: DEFAULT_GRID_POINTS }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::PreconditionViolated(format!("delta = {} must be positive", self.delta)));
        }
        if !(self.lo < self.hi) {
            return Err(Error::PreconditionViolated(format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.grid_points < 2 {
            return Err(Error::PreconditionViolated("grid_points must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    pub quality: ModulusQuality,
    /// Estimate on the base grid, before refinement. Absent for exact values.
    pub coarse: Option<f64>,
    /// Whether refinement moved the estimate by less than one percent.
    pub certified: bool,
}

impl ModulusEstimate {
    pub fn exact(value: f64) -> Self {
        ModulusEstimate { value, quality: ModulusQuality::Exact, coarse: None, certified: true }
    }

    /// From base-grid and refined-grid estimates.
    pub fn estimated(coarse: f64, fine: f64) -> Self {
        let value = fine.max(coarse);
        ModulusEstimate {
            value,
            quality: ModulusQuality::Estimated,
            coarse: Some(coarse),
            certified: value - coarse <= 0.01 * value,
        }
    }
}

/// `omega_1(f, delta)` over `[q.lo, q.hi]`.
pub fn omega1(f: &FunctionSpec, q: &ModulusQuery) -> Result<ModulusEstimate> {
    q.validate()?;
    if !f.domain().contains(q.lo, q.hi) {
        return Err(Error::IntervalViolation { id: f.id().to_string(), lo: q.lo, hi: q.hi });
    }
    if let Some(v) = f.exact_modulus(q.delta, q.lo, q.hi) {
        return Ok(ModulusEstimate::exact(v));
    }
    if !q.lo.is_finite() || !q.hi.is_finite() {
        return Err(Error::IntervalViolation { id: f.id().to_string(), lo: q.lo, hi: q.hi });
    }
    let fine_n = 2 * q.grid_points - 1;
    let xs = uniform_grid(q.lo, q.hi, fine_n);
    let ys: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    let (cx, cy): (Vec<f64>, Vec<f64>) = xs.iter().zip(&ys).step_by(2).map(|(x, y)| (*x, *y)).unzip();
    // pairs exactly delta apart, which the lattice misses when delta is off-grid
    let h = q.delta.min(q.hi - q.lo);
    let shifted: Vec<f64> =
        xs.iter().zip(&ys).map(|(&x, &y)| if x + h <= q.hi { (f.eval(x + h) - y).abs() } else { 0.0 }).collect();
    let reach = |step: usize| shifted.iter().step_by(step).copied().fold(0.0, f64::max);
    let coarse = sampled_modulus(&cx, &cy, q.delta).max(reach(2));
    let fine = sampled_modulus(&xs, &ys, q.delta).max(reach(1));
    Ok(ModulusEstimate::estimated(coarse, fine))
}

/// `points` equally spaced nodes covering `[lo, hi]`, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| if i == points - 1 { hi } else { lo + step * i as f64 }).collect()
}

/// `max |y_i - y_j|` over sample pairs with `|x_i - x_j| <= delta`; `xs` sorted ascending.
///
/// Sliding window with monotone deques, linear in the number of samples.
/// Spacings are compared with a relative slack of `1e-12` so that grid pairs
/// exactly `delta` apart are not lost to rounding of the node coordinates.
pub fn sampled_modulus(xs: &[f64], ys: &[f64], delta: f64) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let delta = delta * (1.0 + 1e-12);
    let mut max_q: VecDeque<usize> = VecDeque::new();
    let mut min_q: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    let mut start = 0;
    for j in 0..xs.len() {
        while xs[j] - xs[start] > delta {
            start += 1;
        }
        while max_q.back().is_some_and(|&i| ys[i] <= ys[j]) {
            max_q.pop_back();
        }
        max_q.push_back(j);
        while min_q.back().is_some_and(|&i| ys[i] >= ys[j]) {
            min_q.pop_back();
        }
        min_q.push_back(j);
        while max_q.front().is_some_and(|&i| i < start) {
            max_q.pop_front();
        }
        while min_q.front().is_some_and(|&i| i < start) {
            min_q.pop_front();
        }
        best = best.max(ys[max_q[0]] - ys[min_q[0]]);
    }
    best
}
