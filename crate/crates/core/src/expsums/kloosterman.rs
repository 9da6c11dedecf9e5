use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::num::{arithmetic_functions, gcd_i, mul_mod, reduce, UnitTable};
use crate::summation::{Accumulator, ExpSumValue, Roots};

/// Largest modulus summed directly.
pub const KLOOSTERMAN_BUDGET: u64 = 10_000_000;

pub(crate) fn check_budget(needed: u64, budget: u64) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// `S(m, n; c)` over a prepared unit table; `m`, `n` already reduced mod `c`.
pub(crate) fn kloosterman_on(units: &UnitTable, roots: &Roots, m: u64, n: u64) -> ExpSumValue {
    let c = units.modulus;
    let mut acc = Accumulator::new();
    for &(x, xinv) in &units.pairs {
        let k = (mul_mod(m, x, c) + mul_mod(n, xinv, c)) % c;
        acc.add(roots.get(k));
    }
    acc.finish()
}

/// Kloosterman sum `S(m, n; c) = Σ_{x mod c, (x,c)=1} e((m x + n x̄)/c)`.
pub fn kloosterman(m: i64, n: i64, c: u64) -> Result<ExpSumValue> {
    if c == 0 {
        return Err(Error::OutOfRange("modulus 0".into()));
    }
    check_budget(c, KLOOSTERMAN_BUDGET)?;
    let units = UnitTable::new(c)?;
    let roots = Roots::of(c);
    Ok(kloosterman_on(&units, &roots, reduce(m, c), reduce(n, c)))
}

/// Evaluates `S(m_i, n_i; c)` for many pairs against one unit table.
pub fn kloosterman_batch(pairs: &[(i64, i64)], c: u64) -> Result<Vec<ExpSumValue>> {
    if c == 0 {
        return Err(Error::OutOfRange("modulus 0".into()));
    }
    check_budget(c, KLOOSTERMAN_BUDGET)?;
    let units = UnitTable::new(c)?;
    let roots = Roots::of(c);
    Ok(pairs
        .iter()
        .map(|&(m, n)| kloosterman_on(&units, &roots, reduce(m, c), reduce(n, c)))
        .collect())
}

/// `S_ψ(m, n; c) = Σ_{x mod c, (x,c)=1} ψ(x) e((m x + n x̄)/c)` with `ψ` a
/// character modulo a prime `p | c`, evaluated through reduction mod `p`.
pub fn twisted_kloosterman(
    psi: &DirichletCharacter,
    m: i64,
    n: i64,
    c: u64,
) -> Result<ExpSumValue> {
    let p = psi.modulus();
    if c == 0 || c % p != 0 {
        return Err(Error::ModulusMismatch {
            character: p,
            modulus: c,
        });
    }
    check_budget(c, KLOOSTERMAN_BUDGET)?;
    let units = UnitTable::new(c)?;
    let roots = Roots::of(c);
    Ok(twisted_on(psi, &units, &roots, reduce(m, c), reduce(n, c)))
}

pub(crate) fn twisted_on(
    psi: &DirichletCharacter,
    units: &UnitTable,
    roots: &Roots,
    m: u64,
    n: u64,
) -> ExpSumValue {
    let c = units.modulus;
    let mut acc = Accumulator::new();
    for &(x, xinv) in &units.pairs {
        let k = (mul_mod(m, x, c) + mul_mod(n, xinv, c)) % c;
        acc.add(psi.eval(x as i64) * roots.get(k));
    }
    acc.finish()
}

/// Ramanujan sum `𝔠_q(n) = μ(q/g)·φ(q)/φ(q/g)` with `g = gcd(n, q)`.
pub fn ramanujan_sum(q: u64, n: i64) -> Result<i64> {
    if q == 0 {
        return Err(Error::OutOfRange("modulus 0".into()));
    }
    let g = if n == 0 { q } else { gcd_i(n, q) };
    let full = arithmetic_functions(q)?;
    let part = arithmetic_functions(q / g)?;
    Ok(part.mobius as i64 * (full.totient / part.totient) as i64)
}

/// Ramanujan sum as an [`ExpSumValue`] (exact, no rounding).
pub fn ramanujan_value(q: u64, n: i64) -> Result<ExpSumValue> {
    let v = ramanujan_sum(q, n)?;
    let terms = arithmetic_functions(q)?.totient;
    Ok(ExpSumValue::exact(Complex64::new(v as f64, 0.0), terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kloosterman_examples() {
        for (m, n) in [(0, 0), (5, -3), (1, 1)] {
            assert_eq!(kloosterman(m, n, 1).unwrap().value, c(1.0, 0.0));
        }
        let s = kloosterman(1, 1, 3).unwrap();
        assert!((s.value - c(-1.0, 0.0)).norm() < 1e-14);
        for q in 1..40u64 {
            for n in -5..15i64 {
                let s = kloosterman(0, n, q).unwrap();
                let r = ramanujan_sum(q, n).unwrap() as f64;
                assert!((s.value - c(r, 0.0)).norm() < 1e-11, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn kloosterman_budget() {
        assert!(matches!(
            kloosterman(1, 1, KLOOSTERMAN_BUDGET + 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn twisted_examples() {
        // principal ψ reproduces the plain Kloosterman sum on units
        let psi0 = DirichletCharacter::principal(5).unwrap();
        for (m, n) in [(1, 1), (2, 7), (0, 3)] {
            let a = twisted_kloosterman(&psi0, m, n, 10).unwrap();
            let b = kloosterman(m, n, 10).unwrap();
            assert!((a.value - b.value).norm() < 1e-12);
        }
        // ψ odd mod 3: ψ(1)e(2/3) + ψ(2)e(1/3) = e(2/3) − e(1/3) = −i√3
        let psi = DirichletCharacter::legendre(3).unwrap();
        let s = twisted_kloosterman(&psi, 1, 1, 3).unwrap();
        assert!((s.value - c(0.0, -3f64.sqrt())).norm() < 1e-14);
        assert_eq!(
            twisted_kloosterman(&psi, 1, 1, 4).unwrap_err(),
            Error::ModulusMismatch {
                character: 3,
                modulus: 4
            }
        );
    }

    #[test]
    fn twisted_p5_c10_against_brute_force() {
        // units mod 10 are 1, 3, 7, 9 with inverses 1, 7, 3, 9
        let psi = DirichletCharacter::new(5, 1).unwrap();
        let mut expect = c(0.0, 0.0);
        for (x, xi) in [(1i64, 1i64), (3, 7), (7, 3), (9, 9)] {
            let ang = std::f64::consts::TAU * ((x + xi) % 10) as f64 / 10.0;
            expect += psi.eval(x) * c(ang.cos(), ang.sin());
        }
        let s = twisted_kloosterman(&psi, 1, 1, 10).unwrap();
        assert!((s.value - expect).norm() < 1e-13);
        assert_eq!(s.terms, 4);
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(6, 0).unwrap(), 2);
        assert_eq!(ramanujan_sum(6, 1).unwrap(), 1);
        assert_eq!(ramanujan_sum(4, 2).unwrap(), -2);
        assert_eq!(ramanujan_sum(1, 17).unwrap(), 1);
        assert_eq!(ramanujan_sum(12, -8).unwrap(), ramanujan_sum(12, 8).unwrap());
    }

    #[test]
    fn twisted_sum_over_all_characters_isolates_x_equiv_one() {
        // Σ_ψ S_ψ(m,n;c) = (p−1) Σ_{x≡1 (p)} e((mx+nx̄)/c)
        let p = 5u64;
        let cmod = 15u64;
        let mut total = c(0.0, 0.0);
        for psi in enumerate_characters(p).unwrap() {
            total += twisted_kloosterman(&psi, 2, 3, cmod).unwrap().value;
        }
        let mut direct = c(0.0, 0.0);
        for &(x, xi) in &UnitTable::new(cmod).unwrap().pairs {
            if x % p == 1 {
                let ang = std::f64::consts::TAU * ((2 * x + 3 * xi) % cmod) as f64 / cmod as f64;
                direct += c(ang.cos(), ang.sin());
            }
        }
        assert!((total - direct * (p - 1) as f64).norm() < 1e-12);
    }
}
