use std::f64::consts::PI;

use apstrip::fourier::{fourier_coefficient, MeanConfig};
use apstrip::harness::{corpus, Report, Verdict};
use apstrip::metrics::{stepanov_seminorm, MetricConfig};
use apstrip::model::{horizontal_shift, Complex, FunctionExpr, HoloPoly};
use apstrip::potential::{green_potential, submean_check, DiskSpec, MeasureSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn holo() -> impl Strategy<Value = HoloPoly> {
    prop::collection::vec((-2.0..2.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..4)
        .prop_map(|t| HoloPoly::new(t.into_iter().map(|(f, re, im)| (f, Complex::new(re, im)))))
}

fn expr() -> impl Strategy<Value = FunctionExpr> {
    let leaf = prop_oneof![
        holo().prop_map(FunctionExpr::log_abs),
        holo().prop_map(FunctionExpr::abs),
        holo().prop_map(FunctionExpr::Re),
        (-3.0..3.0f64, 0.0..2.0f64).prop_map(|(f, a)| FunctionExpr::cosine(f, a)),
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| FunctionExpr::affine_y(a, b)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.plus(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.max(b)),
            (0.0..3.0f64, inner.clone()).prop_map(|(c, e)| e.scale(c)),
            (-5.0..5.0f64, inner.clone()).prop_map(|(t, e)| horizontal_shift(&e, t)),
            inner.prop_map(|e| e.scale(0.1).exp()),
        ]
    })
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn json_round_trip_preserves_values(u in expr(), seed in any::<u64>()) {
        let v = FunctionExpr::from_json(&u.to_json()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let z = Complex::new(rng.gen_range(-10.0..10.0), rng.gen_range(-1.0..1.0));
            let (a, b) = (u.evaluate(z).unwrap(), v.evaluate(z).unwrap());
            prop_assert!(same(a, b), "{a} vs {b} at {z}");
        }
    }
}

fn small_metric() -> MetricConfig {
    MetricConfig {
        x_window: (0.0, 6.0),
        hx: 1e-2,
        ..MetricConfig::default()
    }
}

/// Trigonometric polynomials with frequencies on the lattice `Z / 2`, so
/// that distinct frequencies are well separated at finite averaging windows.
fn trig() -> impl Strategy<Value = FunctionExpr> {
    prop::collection::vec((-6i32..=6, 0.0..2.0f64), 1..3).prop_map(|t| {
        t.into_iter()
            .map(|(f, a)| FunctionExpr::cosine(0.5 * f64::from(f), a))
            .reduce(FunctionExpr::plus)
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn stepanov_is_a_seminorm(u in trig(), v in trig(), w in trig(), c in 0.1..3.0f64) {
        let cfg = small_metric();
        let d = |a: &FunctionExpr, b: &FunctionExpr| stepanov_seminorm(a, b, 0.0, 0.5, &cfg).unwrap().value;
        prop_assert_eq!(d(&u, &u), 0.0);
        let (uv, vu) = (d(&u, &v), d(&v, &u));
        prop_assert!((uv - vu).abs() <= 1e-12 * (1.0 + uv));
        prop_assert!(uv <= d(&u, &w) + d(&w, &v) + 1e-12);
        let scaled = d(&u.clone().scale(c), &v.clone().scale(c));
        prop_assert!((scaled - c * uv).abs() <= 1e-9 * (1.0 + c * uv));
    }

    #[test]
    fn coefficients_are_linear_real_and_shift_covariant(
        u in trig(), v in trig(), half in -6i32..=6, t in -5.0..5.0f64,
    ) {
        let lambda = 0.5 * f64::from(half);
        let cfg = MeanConfig { tol: 1e-6, ..MeanConfig::default() };
        let a = |e: &FunctionExpr, l: f64| fourier_coefficient(e, l, 0.3, &cfg).unwrap().value;
        let sum = a(&u.clone().plus(v.clone()), lambda);
        prop_assert!((sum - a(&u, lambda) - a(&v, lambda)).norm() <= 1e-3);
        prop_assert!((a(&u, -lambda) - a(&u, lambda).conj()).norm() <= 1e-12);
        let shifted = a(&horizontal_shift(&u, t), lambda);
        let rotated = a(&u, lambda) * Complex::new(0.0, lambda * t).exp();
        prop_assert!((shifted - rotated).norm() <= 1e-3, "{shifted} vs {rotated}");
    }

    #[test]
    fn green_potential_is_nonnegative_and_vanishes_on_the_circle(
        atoms in prop::collection::vec((0.0..0.95f64, 0.0..2.0 * PI, 0.1..2.0f64), 1..5),
        r in 0.0..0.99f64, phi in 0.0..2.0 * PI,
    ) {
        let disk = DiskSpec::new(Complex::new(0.3, -0.2), 1.5).unwrap();
        let mu = MeasureSpec {
            atoms: atoms
                .iter()
                .map(|&(s, a, m)| apstrip::potential::Atom { z: disk.center + Complex::from_polar(s * disk.radius, a), mass: m })
                .collect(),
            density: None,
        };
        let inside = green_potential(&mu, &disk, disk.center + Complex::from_polar(r * disk.radius, phi)).unwrap();
        prop_assert!(inside.value >= 0.0);
        let edge = green_potential(&mu, &disk, disk.center + Complex::from_polar(disk.radius, phi)).unwrap();
        prop_assert!(edge.value.abs() <= 1e-9);
    }
}

#[test]
fn corpus_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for item in corpus() {
        let (lo, hi) = item.profile_range;
        let centers: Vec<Complex> = (0..40)
            .map(|_| Complex::new(rng.gen_range(0.0..20.0), rng.gen_range(lo + 0.1..hi - 0.1)))
            .collect();
        let report = submean_check(&item.expr, &centers, &[0.05, 0.1], 1e-6).unwrap();
        assert_eq!(
            report.all_passed(),
            item.subharmonic,
            "{}: worst margin {}",
            item.name,
            report.worst_margin()
        );
    }
}

#[test]
fn verdicts_are_derivable_from_measurements() {
    for r in apstrip::harness::lemma4_suite().unwrap() {
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.derive_verdict(), r.verdict);
        assert_eq!(back.verdict, Verdict::Pass);
    }
}
