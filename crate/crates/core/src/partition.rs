//! Integer-shift sums of the bell density: partition of unity, the
//! truncated denominator on a compact interval, and the tail estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{chi, erf_antiderivative, ln_chi, FRAC_1_SQRT_PI};

/// Beyond this distance from `nx` every `chi(nx - k)` is exactly zero in double precision.
pub const UNDERFLOW_RADIUS: i64 = 30;

/// How a whole-line sum over `k` is cut down to a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub max_radius: i64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { epsilon: 1e-14, max_radius: 64 }
    }
}

impl TruncationPolicy {
    pub fn new(epsilon: f64) -> Result<TruncationPolicy> {
        let p = TruncationPolicy { epsilon, ..Default::default() };
        p.radius()?;
        Ok(p)
    }

    /// Smallest `R` whose excluded mass is certified below `epsilon`.
    ///
    /// With the window `round(nx) - R ..= round(nx) + R`, every excluded term has
    /// `|nx - k| >= R + 1/2`; the envelope `chi(u) < exp(-(u-1)^2)/sqrt(pi)` summed
    /// over both sides gives at most `2/sqrt(pi) exp(-m^2) (1 + 1/(2m))`, `m = R - 1/2`.
    pub fn radius(&self) -> Result<i64> {
        if !(self.epsilon > 0.0) {
            return Err(Error::PreconditionViolated(format!(
                "truncation epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        for r in 1..=self.max_radius {
            if excluded_mass_bound(r) < self.epsilon {
                return Ok(r);
            }
        }
        Err(Error::PreconditionViolated(format!(
            "epsilon {} needs a window wider than max_radius {}",
            self.epsilon, self.max_radius
        )))
    }
}

/// Certified upper bound on the mass of `chi(nx - k)` outside a radius-`r` window.
pub fn excluded_mass_bound(r: i64) -> f64 {
    let m = r as f64 - 0.5;
    2.0 * FRAC_1_SQRT_PI * (-m * m).exp() * (1.0 + 0.5 / m)
}

/// Inclusive range of shift indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    /// `ceil(na) ..= floor(nb)`: the `k` with `k/n` in `[a, b]`.
    pub fn for_interval(n: u64, a: f64, b: f64) -> Result<IndexWindow> {
        let nf = n as f64;
        let lo = (nf * a).ceil() as i64;
        let hi = (nf * b).floor() as i64;
        if lo > hi {
            return Err(Error::WindowEmpty { lo, hi });
        }
        Ok(IndexWindow { lo, hi })
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }
}

/// `round(nx)` and the offset `nx - round(nx)`.
#[inline]
pub(crate) fn center(x: f64, n: u64) -> (i64, f64) {
    let nx = n as f64 * x;
    let c = nx.round();
    (c as i64, nx - c)
}

/// `sum v(k) chi(nx - k)` over `round(nx) - r ..= round(nx) + r`, accumulated
/// outward from the center in symmetric pairs.
#[inline]
pub(crate) fn centered_sum(x: f64, n: u64, r: i64, mut v: impl FnMut(i64) -> f64) -> f64 {
    let (c, u) = center(x, n);
    let mut s = v(c) * chi(u);
    for j in 1..=r {
        let fj = j as f64;
        s += v(c - j) * chi(u + fj) + v(c + j) * chi(u - fj);
    }
    s
}

/// Like [`centered_sum`] but restricted to `window`; returns `(sum v chi, sum chi)`.
#[inline]
pub(crate) fn windowed_sums(x: f64, n: u64, window: IndexWindow, mut v: impl FnMut(i64) -> f64) -> (f64, f64) {
    let (c, u) = center(x, n);
    let mut num = 0.0;
    let mut den = 0.0;
    if window.contains(c) {
        let w = chi(u);
        num += v(c) * w;
        den += w;
    }
    for j in 1..=UNDERFLOW_RADIUS {
        let fj = j as f64;
        let (kl, kr) = (c - j, c + j);
        if kl > window.hi || kr < window.lo {
            continue;
        }
        if window.contains(kl) {
            let w = chi(u + fj);
            num += v(kl) * w;
            den += w;
        }
        if window.contains(kr) {
            let w = chi(u - fj);
            num += v(kr) * w;
            den += w;
        }
    }
    (num, den)
}

/// `sum_k chi(nx - k)` over the truncated window; equals one up to the policy's epsilon.
pub fn partition_sum(x: f64, n: u64, policy: &TruncationPolicy) -> Result<f64> {
    check_n(n)?;
    let r = policy.radius()?;
    Ok(centered_sum(x, n, r, |_| 1.0))
}

/// `V(x) = sum_{k = ceil(na)}^{floor(nb)} chi(nx - k)`.
pub fn interval_denominator(x: f64, n: u64, a: f64, b: f64) -> Result<f64> {
    check_n(n)?;
    check_interval(a, b)?;
    let window = IndexWindow::for_interval(n, a, b)?;
    if !(a <= x && x <= b) {
        return Err(Error::DomainViolation { x, a, b });
    }
    Ok(windowed_sums(x, n, window, |_| 1.0).1)
}

fn tail_threshold(n: u64, alpha: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::PreconditionViolated(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let t = (n as f64).powf(1.0 - alpha);
    if t < 3.0 {
        return Err(Error::PreconditionViolated(format!(
            "n^(1-alpha) = {t:.6} < 3 for n = {n}, alpha = {alpha}"
        )));
    }
    Ok(t)
}

/// Distances `|nx - k|` of the tail terms, `radius + 1` per side, nearest first.
fn tail_terms(x: f64, n: u64, t: f64, radius: i64) -> impl Iterator<Item = f64> {
    let nx = n as f64 * x;
    let below = (nx - t).floor() as i64;
    let above = (nx + t).ceil() as i64;
    (0..=radius).flat_map(move |j| [nx - (below - j) as f64, (above + j) as f64 - nx])
}

/// Tail mass `sum chi(nx - k)` over `|nx - k| >= n^(1 - alpha)`.
///
/// The sum runs from the threshold outward for the policy's radius, past which
/// the remaining mass is below `epsilon` relative to the leading term.
pub fn tail_sum(x: f64, n: u64, alpha: f64, policy: &TruncationPolicy) -> Result<f64> {
    let t = tail_threshold(n, alpha)?;
    let r = policy.radius()?;
    let mut terms: Vec<f64> = tail_terms(x, n, t, r).map(chi).collect();
    terms.sort_by(|p, q| p.total_cmp(q));
    Ok(terms.iter().sum())
}

/// Natural logarithm of [`tail_sum`], finite even where the tail underflows.
pub fn ln_tail_sum(x: f64, n: u64, alpha: f64, policy: &TruncationPolicy) -> Result<f64> {
    let t = tail_threshold(n, alpha)?;
    let r = policy.radius()?;
    let logs: Vec<f64> = tail_terms(x, n, t, r).map(ln_chi).collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs.iter().map(|l| (l - m).exp()).sum();
    Ok(m + s.ln())
}

/// `1 / (2 sqrt(pi) (t - 2) exp((t - 2)^2))` with `t = n^(1 - alpha)`.
pub fn tail_bound(n: u64, alpha: f64) -> Result<f64> {
    let t = tail_threshold(n, alpha)?;
    let s = t - 2.0;
    Ok(0.5 * FRAC_1_SQRT_PI / (s * (s * s).exp()))
}

/// Natural logarithm of [`tail_bound`].
pub fn ln_tail_bound(n: u64, alpha: f64) -> Result<f64> {
    let t = tail_threshold(n, alpha)?;
    let s = t - 2.0;
    Ok((0.5 * FRAC_1_SQRT_PI).ln() - s.ln() - s * s)
}

/// `int_lo^hi chi` from the closed antiderivative.
pub fn chi_integral(lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::PreconditionViolated(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let g = |x: f64| erf_antiderivative(x + 1.0) - erf_antiderivative(x - 1.0);
    Ok(0.25 * (g(hi) - g(lo)))
}

/// Which end of `[a, b]` to probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    A,
    B,
}

/// `1 - V(end)`: how far the truncated sum falls short of one at an endpoint.
pub fn boundary_deficiency(n: u64, a: f64, b: f64, at_end: End) -> Result<f64> {
    let x = match at_end {
        End::A => a,
        End::B => b,
    };
    Ok(1.0 - interval_denominator(x, n, a, b)?)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::PreconditionViolated("n must be at least 1".into()));
    }
    Ok(())
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::PreconditionViolated(format!("need a < b, got [{a}, {b}]")));
    }
    Ok(())
}
