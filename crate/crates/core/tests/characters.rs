use deltasum_core::characters::{enumerate_characters, gauss_sum, DirichletCharacter};
use deltasum_core::num::primes_between;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn completely_multiplicative(
        q in prop::sample::select(primes_between(3, 200)),
        index in any::<u64>(),
        m in any::<i32>(),
        n in any::<i32>(),
    ) {
        let chi = DirichletCharacter::new(q, index % (q - 1)).unwrap();
        let lhs = chi.eval(m as i64 * n as i64);
        let rhs = chi.eval(m as i64) * chi.eval(n as i64);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn orthogonality_in_the_character() {
    for p in primes_between(3, 102) {
        let chars = enumerate_characters(p).unwrap();
        assert_eq!(chars.len() as u64, p - 1);
        for x in 0..p as i64 {
            let total: Complex64 = chars.iter().map(|c| c.eval(x)).sum();
            let expect = if x == 1 { (p - 1) as f64 } else { 0.0 };
            assert!((total - expect).norm() <= 1e-9 * p as f64, "p={p} x={x}");
        }
    }
}

#[test]
fn half_the_characters_are_odd() {
    for p in primes_between(3, 102) {
        let chars = enumerate_characters(p).unwrap();
        let odd = chars.iter().filter(|c| c.is_odd()).count() as u64;
        assert_eq!(odd, (p - 1) / 2, "p={p}");
        for c in &chars {
            let minus_one = c.eval(-1).re;
            assert!((minus_one - c.parity() as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn gauss_sum_magnitude_and_conjugate_product() {
    for q in primes_between(3, 500) {
        for chi in enumerate_characters(q).unwrap().into_iter().filter(|c| !c.is_principal()) {
            let g = gauss_sum(&chi).unwrap().value;
            let tol = 1e-6 * q as f64;
            assert!((g.norm_sqr() - q as f64).abs() <= tol, "q={q}");
            let gbar = gauss_sum(&chi.conj()).unwrap().value;
            let expect = chi.parity() as f64 * q as f64;
            assert!((g * gbar - expect).norm() <= tol, "q={q}");
        }
    }
}
