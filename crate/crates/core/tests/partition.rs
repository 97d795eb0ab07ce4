use erfnn::partition::{
    boundary_deficiency, chi_integral, interval_denominator, ln_tail_bound, ln_tail_sum, partition_sum, tail_bound, tail_sum,
    End, IndexWindow, TruncationPolicy,
};
use erfnn::quadrature::Rule;
use erfnn::special::chi;
use erfnn::Error;
use proptest::prelude::*;

/// Plain summation over every index with `|nx - k| <= 60`.
fn brute_sum(x: f64, n: u64, lo: i64, hi: i64) -> f64 {
    let nx = n as f64 * x;
    let c = nx.round() as i64;
    ((c - 60).max(lo)..=(c + 60).min(hi)).map(|k| chi(nx - k as f64)).sum()
}

#[test]
fn partition_of_unity_on_grid() {
    let policy = TruncationPolicy::new(1e-14).unwrap();
    for n in [1u64, 2, 7, 50, 311] {
        for i in 0..10_000 {
            let x = -8.0 + 16.0 * i as f64 / 9_999.0;
            assert!((partition_sum(x, n, &policy).unwrap() - 1.0).abs() <= 1e-12, "n={n} x={x}");
        }
    }
}

#[test]
fn wide_interval_denominator_is_full_sum() {
    let v = interval_denominator(0.0, 100, -10.0, 10.0).unwrap();
    assert!((v - 1.0).abs() <= 1e-12);
    assert!((v - brute_sum(0.0, 100, -1000, 1000)).abs() <= 1e-15);
}

#[test]
fn tail_bound_values() {
    let sp = std::f64::consts::PI.sqrt();
    let want16 = 1.0 / (2.0 * sp * 2.0 * 4f64.exp());
    assert!((tail_bound(16, 0.5).unwrap() / want16 - 1.0).abs() < 1e-14);
    assert!((tail_bound(16, 0.5).unwrap() - 2.5834e-3).abs() < 1e-7);
    assert!((tail_bound(9, 0.5).unwrap() - 0.10378).abs() < 1e-5);
    let want81 = 1.0 / (2.0 * sp * 7.0 * 49f64.exp());
    assert!((tail_bound(81, 0.5).unwrap() / want81 - 1.0).abs() < 1e-13);
    for x in [0.0, 0.013, 0.5, 0.99] {
        assert!(tail_sum(x, 81, 0.5, &TruncationPolicy::default()).unwrap() < 1e-28);
    }
    assert!(matches!(tail_bound(4, 0.5), Err(Error::PreconditionViolated(_))));
}

#[test]
fn tail_sum_stays_under_bound() {
    let policy = TruncationPolicy::default();
    for n in [9u64, 16, 81, 256, 1024] {
        for alpha in [0.3, 0.5, 0.7, 0.9] {
            if (n as f64).powf(1.0 - alpha) < 3.0 {
                continue;
            }
            for i in 0..200 {
                let x = -5.0 + i as f64 * 0.0517;
                assert!(ln_tail_sum(x, n, alpha, &policy).unwrap() < ln_tail_bound(n, alpha).unwrap());
                let (s, b) = (tail_sum(x, n, alpha, &policy).unwrap(), tail_bound(n, alpha).unwrap());
                assert!(s <= b, "n={n} alpha={alpha} x={x}");
            }
        }
    }
}

#[test]
fn tail_sum_matches_brute_force() {
    let policy = TruncationPolicy::default();
    for x in [0.0, 0.37, -1.2] {
        let n = 16u64;
        let t = 4.0;
        let nx = n as f64 * x;
        let brute: f64 = ((nx - 80.0) as i64..=(nx + 80.0) as i64)
            .filter(|&k| (nx - k as f64).abs() >= t)
            .map(|k| chi(nx - k as f64))
            .sum();
        let s = tail_sum(x, n, 0.5, &policy).unwrap();
        assert!((s - brute).abs() <= 1e-14 * brute, "x={x}: {s} vs {brute}");
    }
}

#[test]
fn chi_integral_matches_quadrature() {
    let rule = Rule::gauss_legendre(64);
    assert!((chi_integral(0.0, 1.0).unwrap() - rule.integrate(0.0, 1.0, chi)).abs() <= 1e-12);
    let mut prev = 0.0;
    for t in [2.0, 4.0, 8.0, 12.0] {
        let v = chi_integral(-t, t).unwrap();
        assert!(v >= prev && v <= 1.0 + 1e-15);
        prev = v;
    }
    assert!((prev - 1.0).abs() <= 1e-12);
}

#[test]
fn boundary_deficiency_does_not_vanish() {
    for n in [10u64, 100, 1000, 10_000] {
        for end in [End::A, End::B] {
            let d = boundary_deficiency(n, 0.0, 1.0, end).unwrap();
            assert!(d > 0.2488 && d < 1.0, "n={n}");
        }
    }
}

#[test]
fn empty_window_is_an_error() {
    assert!(matches!(IndexWindow::for_interval(2, 0.1, 0.4), Err(Error::WindowEmpty { .. })));
    assert!(matches!(interval_denominator(0.2, 2, 0.1, 0.4), Err(Error::WindowEmpty { .. })));
}

proptest! {
    #[test]
    fn denominator_bounds(a in -3.0f64..3.0, len in 0.05f64..4.0, n in 20u64..2000, t in 0.0f64..1.0) {
        let b = a + len;
        prop_assume!(IndexWindow::for_interval(n, a, b).is_ok());
        let x = a + t * len;
        let v = interval_denominator(x, n, a, b).unwrap();
        prop_assert!(v > 0.2488 && v <= 1.0 + 1e-15);
        let w = IndexWindow::for_interval(n, a, b).unwrap();
        prop_assert!((v - brute_sum(x, n, w.lo, w.hi)).abs() <= 1e-15);
    }

    #[test]
    fn partition_of_unity_anywhere(x in -50.0f64..50.0, n in 1u64..5000) {
        prop_assert!((partition_sum(x, n, &TruncationPolicy::default()).unwrap() - 1.0).abs() <= 1e-12);
    }
}
