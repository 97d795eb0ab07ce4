use erfnn::quadrature::Rule;
use erfnn::special::{chi, chi_derivative, chi_envelope, erf, erf_antiderivative, erfc, gamma};
use proptest::prelude::*;

// (x, erf x, erfc x) at 40 significant digits, rounded to f64.
const REFERENCE: &[(f64, f64, f64)] = &[
    (0.0, 0.0, 1.0),
    (1e-10, 1.128379167095512615e-10, 0.99999999988716208329),
    (0.001, 0.0011283787909692364034, 0.9988716212090307636),
    (0.05, 0.056371977797016626955, 0.94362802220298337304),
    (0.1, 0.1124629160182848984, 0.8875370839817151016),
    (0.25, 0.27632639016823693299, 0.72367360983176306701),
    (0.4, 0.42839235504666847645, 0.57160764495333152355),
    (0.5, 0.52049987781304653768, 0.47950012218695346232),
    (0.6, 0.60385609084792590508, 0.39614390915207409492),
    (0.75, 0.7111556336535151316, 0.2888443663464848684),
    (0.84375, 0.76722566123234163346, 0.23277433876765836654),
    (0.9, 0.79690821242283213966, 0.20309178757716786034),
    (1.0, 0.84270079294971486934, 0.15729920705028513066),
    (1.25, 0.92290012825645823014, 0.077099871743541769863),
    (1.5, 0.96610514647531072707, 0.033894853524689272933),
    (1.75, 0.98667167121918244377, 0.013328328780817556228),
    (2.0, 0.99532226501895273416, 0.0046777349810472658379),
    (2.5, 0.99959304798255504106, 0.00040695201744495893956),
    (2.857142857142857, 0.99994668768861167721, 0.000053312311388322794271),
    (3.0, 0.99997790950300141456, 0.000022090496998585441373),
    (3.5, 0.99999925690162765859, 7.4309837234141274552e-7),
    (4.0, 0.99999998458274209972, 1.5417257900280018852e-8),
    (4.5, 0.99999999980338395585, 1.9661604415428874763e-10),
    (5.0, 0.99999999999846254021, 1.5374597944280348502e-12),
    (5.5, 0.99999999999999264215, 7.3578479179743980631e-15),
    (6.0, 0.99999999999999997848, 2.1519736712498913117e-17),
];

/// `erf x = 2/sqrt(pi) e^{-x^2} sum 2^k x^{2k+1} / (2k+1)!!`; every term is positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = 0.0f64;
    let mut k = 0.0f64;
    while term > 1e-18 * sum.max(f64::MIN_POSITIVE) || k < 1.0 {
        sum += term;
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
    }
    2.0 / std::f64::consts::PI.sqrt() * (-x2).exp() * sum
}

#[test]
fn erf_matches_reference_table() {
    for &(x, e, c) in REFERENCE {
        assert!((erf(x) - e).abs() <= 1e-15, "erf({x})");
        assert!((erf(-x) + e).abs() <= 1e-15, "erf(-{x})");
        assert!((erfc(x) - c).abs() <= 4e-15 * c, "erfc({x})");
    }
}

#[test]
fn erf_matches_positive_series() {
    for i in 0..=300 {
        let x = i as f64 * 0.01;
        assert!((erf(x) - erf_series(x)).abs() <= 2e-15, "x = {x}");
    }
}

#[test]
fn erfc_far_tail_is_relative_accurate() {
    for (x, want) in [(10.0, 2.088487583762544757e-45), (20.0, 5.3958656116079009289e-176), (26.0, 5.6631924088561428465e-296)] {
        assert!((erfc(x) / want - 1.0).abs() <= 1e-13, "erfc({x})");
    }
}

#[test]
fn antiderivative_difference_matches_quadrature() {
    let rule = Rule::gauss_legendre(64);
    for (lo, hi) in [(0.0, 1.0), (-2.0, 0.5), (1.0, 4.0)] {
        let q = rule.integrate(lo, hi, erf);
        assert!((erf_antiderivative(hi) - erf_antiderivative(lo) - q).abs() <= 1e-12);
    }
}

#[test]
fn chi_shape() {
    let grid: Vec<f64> = (0..=8000).map(|i| i as f64 * 1e-3).collect();
    for w in grid.windows(2) {
        assert!(chi(w[1]) < chi(w[0]) || chi(w[1]) == 0.0, "not decreasing at {}", w[1]);
    }
    for &x in grid.iter().filter(|&&x| x >= 1.0) {
        assert!(chi(x) < chi_envelope(x), "envelope fails at {x}");
    }
}

#[test]
fn gamma_reference_values() {
    for (x, want) in [(0.5, 1.7724538509055160273), (1.5, 0.88622692545275801365), (2.5, 1.3293403881791370205), (3.3, 2.6834373819557683003), (0.1, 9.5135076986687312858), (7.0, 720.0)] {
        assert!((gamma(x) / want - 1.0).abs() <= 1e-13, "gamma({x})");
    }
}

proptest! {
    #[test]
    fn erf_is_odd(x in -6.0f64..6.0) {
        prop_assert!((erf(x) + erf(-x)).abs() <= 1e-16 * (1.0 + erf(x).abs()));
    }

    #[test]
    fn erf_is_increasing(x in -6.0f64..6.0, h in 1e-3f64..1.0) {
        let (a, b) = (erf(x), erf(x + h));
        prop_assert!(b >= a);
        // beyond |x| = 5 the increments fall below the spacing of doubles near 1
        if x.abs() <= 5.0 && (x + h).abs() <= 5.0 {
            prop_assert!(b > a);
        }
    }

    #[test]
    fn erfc_is_strictly_decreasing(x in 0.0f64..26.0, h in 1e-3f64..1.0) {
        prop_assert!(erfc(x + h) < erfc(x));
    }

    #[test]
    fn chi_is_even(x in -8.0f64..8.0) {
        prop_assert!((chi(x) - chi(-x)).abs() <= 1e-16);
    }

    #[test]
    fn chi_derivative_matches_central_difference(x in -6.0f64..6.0) {
        let h = 1e-6;
        let fd = (chi(x + h) - chi(x - h)) / (2.0 * h);
        prop_assert!((chi_derivative(x) - fd).abs() <= 1e-8);
    }

    #[test]
    fn erf_plus_erfc_is_one(x in -5.0f64..5.0) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() <= 2e-16);
    }
}
