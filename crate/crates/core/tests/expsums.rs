use deltasum_core::characters::{enumerate_characters, DirichletCharacter};
use deltasum_core::expsums::{
    c3_closed, c3_diagonal, c3_raw, d_sum, kloosterman, kloosterman_batch, psi_average_closed,
    psi_average_raw, ramanujan_sum, twisted_kloosterman, PsiAverageParams,
};
use deltasum_core::num::{gcd, mod_inv, mul_mod, reduce};
use deltasum_core::summation::identity_holds;
use num_complex::Complex64;
use proptest::prelude::*;

fn brute_kloosterman(m: i64, n: i64, c: u64) -> Complex64 {
    (0..c)
        .filter(|&x| gcd(x, c) == 1)
        .map(|x| {
            let xi = mod_inv(x as i64, c).unwrap();
            let t = (reduce(m, c) as u128 * x as u128 + reduce(n, c) as u128 * xi as u128) % c as u128;
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / c as f64)
        })
        .sum()
}

#[test]
fn small_values() {
    assert!((kloosterman(1, 1, 3).unwrap().value.re + 1.0).abs() < 1e-12);
    assert!((kloosterman(0, 0, 12).unwrap().value.re - 4.0).abs() < 1e-12);
    assert_eq!(ramanujan_sum(12, 0).unwrap(), 4);
    assert_eq!(ramanujan_sum(12, 1).unwrap(), 0);
    assert_eq!(ramanujan_sum(30, 1).unwrap(), -1);
}

#[test]
fn kloosterman_is_real() {
    for c in 1..=500u64 {
        let pairs: Vec<(i64, i64)> = (0..c as i64)
            .step_by(((c / 8) as usize).max(1))
            .flat_map(|m| [(m, 1), (m, m + 3), (m, c as i64 - 1)])
            .collect();
        for (v, (m, n)) in kloosterman_batch(&pairs, c).unwrap().iter().zip(&pairs) {
            assert!(v.value.im.abs() <= 1e-9 * c as f64, "S({m},{n};{c})");
        }
    }
}

#[test]
fn kloosterman_is_symmetric() {
    for c in 1..=100u64 {
        for m in 0..c as i64 {
            for n in m..c as i64 {
                let a = kloosterman(m, n, c).unwrap();
                let b = kloosterman(n, m, c).unwrap();
                assert!(identity_holds(&a, &b), "c={c} m={m} n={n}");
            }
        }
    }
}

#[test]
fn twisted_multiplicativity() {
    for c1 in 1..=100u64 {
        for c2 in (c1 + 1..=100).filter(|&c2| gcd(c1, c2) == 1).step_by(7) {
            let (m, n) = (5i64, 17i64);
            let full = kloosterman(m, n, c1 * c2).unwrap();
            let i2 = mod_inv(c2 as i64, c1).unwrap() as i64;
            let i1 = mod_inv(c1 as i64, c2).unwrap() as i64;
            let a = kloosterman(i2 * m, i2 * n, c1).unwrap();
            let b = kloosterman(i1 * m, i1 * n, c2).unwrap();
            assert!(identity_holds(&full, &a.mul(b)), "c1={c1} c2={c2}");
        }
    }
}

#[test]
fn twisted_by_principal_matches_plain_on_coprime_moduli() {
    let psi = DirichletCharacter::principal(5).unwrap();
    for c in [7u64, 21, 33] {
        let t = twisted_kloosterman(&psi, 2, 3, 5 * c).unwrap();
        let direct: Complex64 = (0..5 * c)
            .filter(|&x| gcd(x, 5 * c) == 1)
            .map(|x| {
                let xi = mod_inv(x as i64, 5 * c).unwrap();
                let t = (2 * x + 3 * xi) % (5 * c);
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / (5 * c) as f64)
            })
            .sum();
        assert!((t.value - direct).norm() < 1e-9);
    }
}

proptest! {
    #[test]
    fn matches_brute_force(m in -10_000i64..10_000, n in -10_000i64..10_000, c in 1u64..300) {
        let fast = kloosterman(m, n, c).unwrap();
        prop_assert!((fast.value - brute_kloosterman(m, n, c)).norm() < 1e-8);
    }

    #[test]
    fn invariant_under_unit_scaling(m in 0i64..1000, n in 0i64..1000, c in 2u64..400, a in 1u64..400) {
        prop_assume!(gcd(a, c) == 1);
        let ai = mod_inv(a as i64, c).unwrap();
        let s = kloosterman(m, n, c).unwrap();
        let t = kloosterman(
            mul_mod(a % c, reduce(m, c), c) as i64,
            mul_mod(ai, reduce(n, c), c) as i64,
            c,
        ).unwrap();
        prop_assert!(identity_holds(&s, &t));
    }

    #[test]
    fn periodic_in_both_arguments(m in 0i64..1000, n in 0i64..1000, c in 1u64..400, k in -5i64..5) {
        let s = kloosterman(m, n, c).unwrap();
        let t = kloosterman(m + k * c as i64, n - k * c as i64, c).unwrap();
        prop_assert!(identity_holds(&s, &t));
    }
}

#[test]
fn psi_average_on_full_grid() {
    for p in [3u64, 5, 7] {
        for big_m in [11u64, 13] {
            for c in (1..=6u64).filter(|c| gcd(p, c * big_m) == 1) {
                for r in 1..=10 {
                    for m in 1..=10 {
                        let params = PsiAverageParams::new(r, m, c, p, big_m);
                        let raw = psi_average_raw(&params).unwrap();
                        let closed = psi_average_closed(&params).unwrap();
                        assert!(identity_holds(&raw, &closed), "{params:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn c3_exhaustive() {
    for big_m in [5u64, 7, 11, 13] {
        for chi in enumerate_characters(big_m).unwrap().into_iter().filter(|c| !c.is_principal()) {
            for v in 1..big_m as i64 {
                let raw = c3_raw(v, &chi).unwrap();
                let closed = c3_closed(v, &chi).unwrap();
                assert!(identity_holds(&raw, &closed), "M={big_m} v={v}");
                if v == 1 {
                    assert_eq!(closed.value.re.round() as i64, c3_diagonal(big_m));
                } else {
                    assert!(closed.norm() <= 3.0 * big_m as f64);
                }
            }
        }
    }
}

#[test]
fn d_sum_square_root_size() {
    for big_m in [101u64, 211, 293] {
        for chi in enumerate_characters(big_m).unwrap().into_iter().skip(1).step_by(17) {
            for u in 1..big_m as i64 {
                assert!(d_sum(u, &chi).unwrap().norm() <= 4.0 * (big_m as f64).sqrt());
            }
        }
    }
}
