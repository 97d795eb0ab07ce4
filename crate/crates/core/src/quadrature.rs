//! Gaussian quadrature rules built by Newton iteration on the three-term
//! recurrences (Legendre and Jacobi families).

use crate::special::gamma;

/// Nodes and weights of an interpolatory rule on a fixed reference interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss–Legendre rule with `n` nodes on `[-1, 1]`.
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let (p1, p2) = legendre_pair(n, z);
                pp = nf * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-16 {
                    break;
                }
            }
            let (p1, p2) = legendre_pair(n, z);
            pp = if pp == 0.0 { 1.0 } else { nf * (z * p1 - p2) / (z * z - 1.0) };
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    }

    /// Gauss–Jacobi rule with `n` nodes for the weight `(1 - u)^a (1 + u)^b` on `[-1, 1]`.
    ///
    /// Initial guesses follow the asymptotic formulas of Numerical Recipes' `gaujac`.
    pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
        assert!(n >= 1, "rule needs at least one node");
        assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
        let nf = n as f64;
        let ab = a + b;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mass = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
        let mut z: f64 = 0.0;
        for i in 0..n {
            if n == 1 {
                z = (b - a) / (ab + 2.0);
            } else if i == 0 {
                let an = a / nf;
                let bn = b / nf;
                let r1 = (1.0 + a) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
                let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
                z = 1.0 - r1 / r2;
            } else if i == 1 {
                let r1 = (4.1 + a) / ((1.0 + a) * (1.0 + 0.156 * a));
                let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * a) / nf;
                let r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * a.abs()) / nf;
                z -= (1.0 - z) * r1 * r2 * r3;
            } else if i == 2 {
                let r1 = (1.67 + 0.28 * a) / (1.0 + 0.37 * a);
                let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
                let r3 = 1.0 + 8.0 * b / ((6.28 + b) * nf * nf);
                z -= (x[0] - z) * r1 * r2 * r3;
            } else if i == n - 2 {
                let r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
                let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
                let r3 = 1.0 / (1.0 + 20.0 * a / ((7.5 + a) * nf * nf));
                z += (z - x[n - 4]) * r1 * r2 * r3;
            } else if i == n - 1 {
                let r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
                let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
                let r3 = 1.0 / (1.0 + 8.0 * a / ((6.28 + a) * nf * nf));
                z += (z - x[n - 3]) * r1 * r2 * r3;
            } else {
                z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
            }
            for _ in 0..100 {
                let (q1, q2, temp) = jacobi_pair(n, a, b, z);
                let pp = (nf * (a - b - temp * z) * q1 + 2.0 * (nf + a) * (nf + b) * q2)
                    / (temp * (1.0 - z * z));
                let z1 = z;
                z = z1 - q1 / pp;
                if (z - z1).abs() <= 1e-15 {
                    break;
                }
            }
            x[i] = z;
            w[i] = christoffel_weight(n, a, b, mass, z);
        }
        x.reverse();
        w.reverse();
        Rule { nodes: x, weights: w }
    }

    /// Applies the rule to `f` after mapping `[-1, 1]` affinely onto `[lo, hi]`.
    /// Only meaningful for Legendre rules (unit weight).
    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(mid + half * u)).sum();
        half * s
    }
}

// (P_n(z), P_{n-1}(z))
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

// 1 / sum_k p_k(z)^2 over the orthonormal Jacobi polynomials of degree < n.
// Better conditioned near the endpoints than the derivative formula.
fn christoffel_weight(n: usize, a: f64, b: f64, mass: f64, z: f64) -> f64 {
    let ab = a + b;
    let diag = |k: usize| -> f64 {
        if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            let t = 2.0 * k as f64 + ab;
            (b * b - a * a) / (t * (t + 2.0))
        }
    };
    let off = |k: usize| -> f64 {
        let kf = k as f64;
        let t = 2.0 * kf + ab;
        if k == 1 {
            (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))).sqrt()
        } else {
            (4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
        }
    };
    let mut prev = 0.0;
    let mut cur = 1.0 / mass.sqrt();
    let mut sum = cur * cur;
    for k in 0..n.saturating_sub(1) {
        let next = ((z - diag(k)) * cur - if k == 0 { 0.0 } else { off(k) * prev }) / off(k + 1);
        prev = cur;
        cur = next;
        sum += cur * cur;
    }
    1.0 / sum
}

// (P_n^{(a,b)}(z), P_{n-1}^{(a,b)}(z), 2n + a + b)
fn jacobi_pair(n: usize, a: f64, b: f64, z: f64) -> (f64, f64, f64) {
    let ab = a + b;
    let mut temp = 2.0 + ab;
    let mut p1 = (a - b + temp * z) / 2.0;
    let mut p2 = 1.0;
    for j in 2..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        temp = 2.0 * jf + ab;
        let c1 = 2.0 * jf * (jf + ab) * (temp - 2.0);
        let c2 = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
        let c3 = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
        p1 = (c2 * p2 - c3 * p3) / c1;
    }
    if n == 1 {
        temp = 2.0 + ab;
    }
    (p1, p2, temp)
}

/// Rule for `int_0^1 (1 - s)^a g(s) ds`, the weakly singular kernel of the
/// Caputo integrals after the substitution that puts the singularity at `s = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularRule {
    pub exponent: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SingularRule {
    pub fn new(n: usize, exponent: f64) -> SingularRule {
        let rule = Rule::gauss_jacobi(n, exponent, 0.0);
        let scale = 2f64.powf(-exponent - 1.0);
        SingularRule {
            exponent,
            nodes: rule.nodes.iter().map(|u| 0.5 * (1.0 + u)).collect(),
            weights: rule.weights.iter().map(|w| w * scale).collect(),
        }
    }

    pub fn apply(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(s, w)| w * g(*s)).sum()
    }
}
