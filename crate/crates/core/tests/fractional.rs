use erfnn::corpus::{builtin, fractional_corpus};
use erfnn::expr::{parse, to_function_spec};
use erfnn::fractional::{caputo_left, caputo_modulus, caputo_order, caputo_right, caputo_sup_norm, gamma_fn, FractionalSpec, Side};
use erfnn::modulus::uniform_grid;
use erfnn::operators::{Domain, FunctionSpec};
use erfnn::Error;
use proptest::prelude::*;

/// Graded-mesh oracle: with `nu = N - alpha` and `t = x - u^(1/nu)` the kernel
/// `(x - t)^(nu - 1) dt` becomes `du / nu`, leaving a bounded integrand that a
/// composite Simpson rule on a uniform `u` mesh handles.
fn oracle_left(dn: impl Fn(f64) -> f64, alpha: f64, x0: f64, x: f64) -> f64 {
    let nu = alpha.ceil() - alpha;
    let top = (x - x0).powf(nu);
    let m = 20_000;
    let h = top / m as f64;
    let g = |u: f64| dn(x - u.powf(1.0 / nu));
    let mut s = g(0.0) + g(top);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    s * h / 3.0 / nu / gamma_fn(nu).unwrap()
}

fn spec(s: &str) -> FunctionSpec {
    to_function_spec(s, &parse(s).unwrap(), Domain::WholeLine, 4)
}

#[test]
fn gamma_values() {
    assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
    assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
    assert!((gamma_fn(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() <= 1e-15);
    assert!(matches!(gamma_fn(0.0), Err(Error::PreconditionViolated(_))));
}

#[test]
fn gamma_half_matches_defining_integral() {
    // int_0^inf t^{-1/2} e^{-t} dt = 2 int_0^inf e^{-s^2} ds
    let rule = erfnn::quadrature::Rule::gauss_legendre(64);
    let q: f64 = (0..12).map(|k| 2.0 * rule.integrate(k as f64 * 0.5, (k + 1) as f64 * 0.5, |s| (-s * s).exp())).sum();
    assert!((q - gamma_fn(0.5).unwrap()).abs() <= 1e-12);
}

#[test]
fn left_derivative_matches_graded_mesh_oracle() {
    for (text, dns) in [
        ("sin(x)", [f64::cos as fn(f64) -> f64, |t: f64| -t.sin(), |t: f64| -t.cos()]),
        ("exp(2*x)", [|t: f64| 2.0 * (2.0 * t).exp(), |t: f64| 4.0 * (2.0 * t).exp(), |t: f64| 8.0 * (2.0 * t).exp()]),
    ] {
        let f = spec(text);
        for alpha in [0.3, 0.5, 0.7, 1.25, 1.5, 2.5] {
            let n = caputo_order(alpha).unwrap();
            for (x0, x) in [(0.0, 1.0), (-0.7, 0.4), (0.2, 2.1)] {
                let got = caputo_left(&f, &FractionalSpec::new(alpha, x0, Side::Left).unwrap(), x).unwrap();
                let want = oracle_left(dns[n - 1], alpha, x0, x);
                assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "{text} alpha={alpha} x0={x0}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn right_derivative_mirrors_left() {
    // D_{x0-} f(x) = D_{*(-x0)} g(-x) with g(t) = f(-t)
    let f = spec("exp(x) + x^3");
    let g = spec("exp(-x) - x^3");
    for alpha in [0.5, 1.5, 2.5] {
        for (x0, x) in [(1.0, 0.0), (0.3, -1.2)] {
            let r = caputo_right(&f, &FractionalSpec::new(alpha, x0, Side::Right).unwrap(), x).unwrap();
            let l = caputo_left(&g, &FractionalSpec::new(alpha, -x0, Side::Left).unwrap(), -x).unwrap();
            assert!((r - l).abs() <= 1e-12 * (1.0 + l.abs()), "alpha={alpha}");
        }
    }
}

#[test]
fn integer_order_and_identity() {
    assert!(FractionalSpec::new(2.0, 0.0, Side::Left).is_err());
    let f = builtin("sin").unwrap();
    let id = FractionalSpec::new(0.0, 0.0, Side::Left).unwrap();
    assert_eq!(caputo_left(&f, &id, 0.7).unwrap(), 0.7f64.sin());
}

#[test]
fn sup_norm_and_modulus_ceilings() {
    for f in fractional_corpus() {
        let (a, b) = f.reference_interval().unwrap();
        for alpha in [0.5, 1.5] {
            let n = caputo_order(alpha).unwrap();
            let dn = f.derivative(n).unwrap();
            let dn_sup = uniform_grid(a, b, 4001).iter().map(|&t| dn.eval(t).abs()).fold(0.0, f64::max);
            let ceiling = dn_sup * (b - a).powf(n as f64 - alpha) / gamma_fn(n as f64 - alpha + 1.0).unwrap();
            for x0 in uniform_grid(a, b, 64) {
                let left = FractionalSpec::new(alpha, x0, Side::Left).unwrap();
                let right = left.with_side(Side::Right);
                for (s, sub) in [(left, (x0, b)), (right, (a, x0))] {
                    if sub.1 - sub.0 < 1e-12 {
                        continue;
                    }
                    let sup = caputo_sup_norm(&f, &s, sub, 256).unwrap();
                    assert!(sup <= ceiling * (1.0 + 1e-8), "{} alpha={alpha} x0={x0}", f.id());
                    for delta in [0.01, 0.1, 0.5] {
                        let m = caputo_modulus(&f, &s, delta, sub).unwrap();
                        assert!(m.value <= 2.0 * ceiling + 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn monomial_sup_sits_at_far_endpoint() {
    let f = spec("x^3");
    let s = FractionalSpec::new(1.5, 0.0, Side::Left).unwrap();
    let want = gamma_fn(4.0).unwrap() / gamma_fn(2.5).unwrap();
    assert!((caputo_sup_norm(&f, &s, (0.0, 1.0), 512).unwrap() - want).abs() <= 1e-12 * want);
    let lin = spec("3*x - 1");
    assert_eq!(caputo_sup_norm(&lin, &FractionalSpec::new(2.5, 0.0, Side::Left).unwrap(), (0.0, 1.0), 64).unwrap(), 0.0);
    let m = caputo_modulus(&lin, &FractionalSpec::new(2.5, 0.0, Side::Left).unwrap(), 0.1, (0.0, 1.0)).unwrap();
    assert_eq!(m.value, 0.0);
}

proptest! {
    #[test]
    fn growth_envelope(alpha in 0.05f64..2.95, x0 in -2.0f64..2.0, h in 0.0f64..3.0) {
        prop_assume!((alpha - alpha.round()).abs() > 1e-3);
        let f = spec("sin(3*x) + exp(x/2)");
        let n = caputo_order(alpha).unwrap();
        let dn = f.derivative(n).unwrap();
        let sup = uniform_grid(x0, x0 + h, 2001).iter().map(|&t| dn.eval(t).abs()).fold(0.0, f64::max);
        let v = caputo_left(&f, &FractionalSpec::new(alpha, x0, Side::Left).unwrap(), x0 + h).unwrap();
        let env = sup * h.powf(n as f64 - alpha) / gamma_fn(n as f64 - alpha + 1.0).unwrap();
        prop_assert!(v.abs() <= env * (1.0 + 1e-8) + 1e-300);
    }

    #[test]
    fn zero_extension_is_exact(alpha in 0.1f64..2.9, x0 in -2.0f64..2.0, h in 1e-9f64..3.0) {
        prop_assume!((alpha - alpha.round()).abs() > 1e-3);
        let f = spec("exp(x)");
        let l = FractionalSpec::new(alpha, x0, Side::Left).unwrap();
        prop_assert_eq!(caputo_left(&f, &l, x0 - h).unwrap(), 0.0);
        prop_assert_eq!(caputo_right(&f, &l.with_side(Side::Right), x0 + h).unwrap(), 0.0);
    }
}
