use deltasum_core::num::{
    divisor_count, factorize, gcd, mobius, mod_inv, mul_mod, totient, RationalAngle,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn mod_inv_is_an_inverse(m in 2u64..(1 << 31), a in any::<i64>()) {
        prop_assume!(gcd(a.unsigned_abs() % m, m) == 1);
        let inv = mod_inv(a, m).unwrap();
        let a_red = a.rem_euclid(m as i64) as u64;
        prop_assert_eq!(mul_mod(a_red, inv, m), 1 % m);
    }

    #[test]
    fn angle_addition_is_exact(
        a in (-1000i128..1000, 1u64..5000),
        b in (-1000i128..1000, 1u64..5000),
        c in (-1000i128..1000, 1u64..5000),
    ) {
        let (x, y, z) = (
            RationalAngle::new(a.0, a.1).unwrap(),
            RationalAngle::new(b.0, b.1).unwrap(),
            RationalAngle::new(c.0, c.1).unwrap(),
        );
        prop_assert_eq!(x.add(y).unwrap(), y.add(x).unwrap());
        prop_assert_eq!(
            x.add(y).unwrap().add(z).unwrap(),
            x.add(y.add(z).unwrap()).unwrap()
        );
        prop_assert!(x.sub(x).unwrap().is_zero());
    }

    #[test]
    fn products_of_31_bit_moduli_do_not_wrap(a in 0u64..(1 << 31), b in 0u64..(1 << 31), m in 1u64..(1 << 31)) {
        let expect = ((a as u128 * b as u128) % m as u128) as u64;
        prop_assert_eq!(mul_mod(a % m, b % m, m), expect);
    }
}

#[test]
fn arithmetic_functions_match_definitions() {
    for n in 1..=10_000u64 {
        let f = factorize(n).unwrap();
        assert_eq!(f.recompose(), n);
        let direct_phi = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
        let direct_d = (1..=n).filter(|k| n % k == 0).count() as u64;
        assert_eq!(totient(n).unwrap(), direct_phi, "phi({n})");
        assert_eq!(divisor_count(n).unwrap(), direct_d, "d({n})");
        let mu: i64 = (1..=n)
            .filter(|&k| gcd(k, n) == 1)
            .map(|k| RationalAngle::new(k as i128, n).unwrap().unit().re)
            .sum::<f64>()
            .round() as i64;
        assert_eq!(mobius(n).unwrap() as i64, mu, "mu({n})");
    }
}
