use std::f64::consts::PI;

use deltasum_core::oscillatory::{
    bessel_j, integral_i, integral_i_on, modulus_for_multiplier, transition_cutoff, Cutoff,
    CutoffMode, DyadicScale, IntegralParams, WindowFunction, INTEGRAL_TOLERANCE, NEGLIGIBLE,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn toy_plateau() -> WindowFunction {
    WindowFunction::plateau(1.0 / 154.0, 1e4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn three_term_recurrence(nu in 1u32..=60, x in 0.1f64..200.0) {
        let (a, b, c) = (bessel_j(nu - 1, x).unwrap(), bessel_j(nu, x).unwrap(), bessel_j(nu + 1, x).unwrap());
        let residual = (a + c - 2.0 * nu as f64 / x * b).abs();
        prop_assert!(residual <= 1e-9 * b.abs().max(1.0), "residual {residual}");
    }

    #[test]
    fn bounded_by_one(nu in 0u32..=200, x in 0.0f64..2000.0) {
        prop_assert!(bessel_j(nu, x).unwrap().abs() <= 1.0);
    }
}

/// Composite Simpson on a fixed grid, straight from the defining integral.
fn simpson_oracle(p: &IntegralParams, w: &WindowFunction, intervals: usize) -> Complex64 {
    let q = (p.c * p.p * p.big_m) as f64;
    let (lo, hi) = w.support();
    let h = (hi - lo) / intervals as f64;
    let constant = ((p.n * p.l) as f64 / q).fract();
    let f = |y: f64| {
        let arg = 4.0 * PI * (p.n_len * p.n as f64 * (p.l * p.l) as f64 * y).sqrt() / q;
        let j = bessel_j(p.k - 1, arg).unwrap();
        let turn = p.n_len * p.l as f64 * y / q + constant;
        Complex64::from_polar(j * w.eval(y), 2.0 * PI * turn)
    };
    let mut total = f(lo) + f(hi);
    for i in 1..intervals {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += f(lo + i as f64 * h) * weight;
    }
    total * (h / 3.0)
}

#[test]
fn agrees_with_simpson_oracle() {
    let w = WindowFunction::Bump;
    for c in [3u64, 5, 9] {
        let p = IntegralParams { k: 11, ..IntegralParams::toy(c) };
        let adaptive = integral_i(&p, &w).unwrap();
        let coarse = simpson_oracle(&p, &w, 20_000);
        let fine = simpson_oracle(&p, &w, 40_000);
        assert!((coarse - fine).norm() < 1e-10, "oracle not converged at c={c}");
        assert!((adaptive.value - fine).norm() < 1e-9, "c={c}: {} vs {fine}", adaptive.value);
    }
}

#[test]
fn halving_tolerance_stays_within_error_estimate() {
    let w = toy_plateau();
    for c in [2u64, 8, 15] {
        let p = IntegralParams::toy(c);
        let a = integral_i_on(&p, &w, w.support(), 2.0 * INTEGRAL_TOLERANCE).unwrap();
        let b = integral_i_on(&p, &w, w.support(), INTEGRAL_TOLERANCE).unwrap();
        let change = (a.value - b.value).norm();
        assert!(change <= a.est_error.max(b.est_error) + 2.0 * INTEGRAL_TOLERANCE, "c={c}: {change}");
    }
}

#[test]
fn negligible_past_four_cutoffs() {
    let scale = DyadicScale::toy();
    let w = toy_plateau();
    let c = modulus_for_multiplier(4.0, &scale);
    let v = integral_i(&IntegralParams::toy(c), &w).unwrap();
    assert!(v.value.norm() <= NEGLIGIBLE);
    let c = modulus_for_multiplier(0.25, &scale);
    let v = integral_i(&IntegralParams::toy(c), &w).unwrap();
    assert!(v.value.norm().is_finite() && v.value.norm() > NEGLIGIBLE);
}

#[test]
fn raising_the_weight_does_not_grow_the_tail() {
    let scale = DyadicScale::toy();
    let w = toy_plateau();
    for t in [4.0, 8.0, 16.0] {
        let c = modulus_for_multiplier(t, &scale);
        let high = integral_i(&IntegralParams::toy(c), &w).unwrap();
        let low = integral_i(&IntegralParams { k: 11, ..IntegralParams::toy(c) }, &w).unwrap();
        assert!(high.value.norm() <= low.value.norm() + high.est_error + low.est_error, "t={t}");
    }
}

#[test]
fn cutoff_scales() {
    let base = DyadicScale::toy();
    let bound = |s: &DyadicScale| match transition_cutoff(s, CutoffMode::Modulus) {
        Cutoff::Bound(v) => v,
        other => panic!("{other:?}"),
    };
    let c0 = bound(&base);
    assert!(c0 > 0.0);
    assert!((bound(&DyadicScale { l_len: 2.0 * base.l_len, ..base }) / c0 - 2.0).abs() < 1e-12);
    assert!(bound(&DyadicScale { p_len: 1.5 * base.p_len, ..base }) < c0);
}
