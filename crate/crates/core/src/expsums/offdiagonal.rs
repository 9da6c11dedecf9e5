//! Character sums met after Poisson summation on the `r`-sum of the
//! off-diagonal: the full sum modulo `cM` and its two CRT factors.

use num_complex::Complex64;

use super::dsum::d_sum;
use super::kloosterman::{check_budget, kloosterman_on, KLOOSTERMAN_BUDGET};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::num::{gcd, mod_inv, mul_mod, reduce, UnitTable};
use crate::summation::{Accumulator, ExpSumValue, Roots};

fn inverse_of_product(a: u64, b: u64, modulus: u64) -> Result<u64> {
    if gcd(a, modulus) != 1 || gcd(b, modulus) != 1 {
        let p = if gcd(a, modulus) != 1 { a } else { b };
        return Err(Error::SharedFactor { p, modulus });
    }
    mod_inv(mul_mod(a % modulus, b % modulus, modulus.max(1)) as i64, modulus)
}

/// `Σ_{a mod c} S(u a, u nℓ; c)·e(−u(a + nℓ)/c)` with `u = \overline{pM}` mod `c`.
/// Evaluates to `c`.
pub fn c1_sum(c: u64, p: u64, big_m: u64, n: i64, l: i64) -> Result<ExpSumValue> {
    check_budget(c * c, KLOOSTERMAN_BUDGET)?;
    let u = inverse_of_product(p, big_m, c)?;
    let units = UnitTable::new(c)?;
    let roots = Roots::of(c);
    let nl = reduce(reduce(n, c) as i64 * reduce(l, c) as i64, c);
    let second = mul_mod(u, nl, c);
    let mut acc = Accumulator::new();
    let mut terms = 0;
    for a in 0..c {
        let s = kloosterman_on(&units, &roots, mul_mod(u, a, c), second);
        let phase = roots.get((c - mul_mod(u, (a + nl) % c, c)) % c);
        acc.add(s.value * phase);
        terms += s.terms;
    }
    let mut out = acc.finish();
    out.terms = terms;
    Ok(out)
}

/// `Σ_{a mod M} χ(a) S(u a, u nℓ; M) e(−u(a+nℓ)/M)` with `u = \overline{pc}` mod `M`.
pub fn c2_raw(chi: &DirichletCharacter, p: u64, c: u64, n: i64, l: i64) -> Result<ExpSumValue> {
    let m = chi.modulus();
    let u = inverse_of_product(p, c, m)?;
    let units = UnitTable::new(m)?;
    let roots = Roots::of(m);
    let nl = reduce(reduce(n, m) as i64 * reduce(l, m) as i64, m);
    let second = mul_mod(u, nl, m);
    let mut acc = Accumulator::new();
    let mut terms = 0;
    for a in 0..m {
        let s = kloosterman_on(&units, &roots, mul_mod(u, a, m), second);
        let phase = roots.get((m - mul_mod(u, (a + nl) % m, m)) % m);
        acc.add(chi.eval(a as i64) * s.value * phase);
        terms += s.terms;
    }
    let mut out = acc.finish();
    out.terms = terms;
    Ok(out)
}

/// `χ(pc)·g_χ·𝔇(\overline{pc}nℓ; M)`.
pub fn c2_closed(chi: &DirichletCharacter, p: u64, c: u64, n: i64, l: i64) -> Result<ExpSumValue> {
    let m = chi.modulus();
    let u = inverse_of_product(p, c, m)?;
    let arg = mul_mod(u, reduce(reduce(n, m) as i64 * reduce(l, m) as i64, m), m);
    let d = d_sum(arg as i64, chi)?;
    let pc = mul_mod(p % m, c % m, m) as i64;
    Ok(d.scale(chi.eval(pc) * gauss_sum(chi)?.value))
}

/// The inner sum `Σ_{a mod M} χ(a) e((b−1)·u·a/M)`, `u = \overline{pc}`.
/// Vanishes at `b ≡ 1`; otherwise equals `χ(pc)χ̄(b−1)g_χ`.
pub fn c2_inner(chi: &DirichletCharacter, p: u64, c: u64, b: i64) -> Result<ExpSumValue> {
    let m = chi.modulus();
    let u = inverse_of_product(p, c, m)?;
    let roots = Roots::of(m);
    let step = mul_mod(reduce(b - 1, m), u, m);
    let mut acc = Accumulator::new();
    for a in 0..m {
        acc.add(chi.eval(a as i64) * roots.get(mul_mod(step, a, m)));
    }
    Ok(acc.finish())
}

/// `Σ_{a mod cM} χ(a) S(p̄a, p̄nℓ; cM) e(−p̄(a+nℓ)/cM)` summed directly.
pub fn offdiagonal_sum_raw(
    chi: &DirichletCharacter,
    p: u64,
    c: u64,
    n: i64,
    l: i64,
) -> Result<ExpSumValue> {
    let q = c * chi.modulus();
    check_budget(q * q, KLOOSTERMAN_BUDGET * 10)?;
    if gcd(c, chi.modulus()) != 1 {
        return Err(Error::SharedFactor {
            p: chi.modulus(),
            modulus: c,
        });
    }
    let pinv = inverse_of_product(p, 1, q)?;
    let units = UnitTable::new(q)?;
    let roots = Roots::of(q);
    let nl = reduce(reduce(n, q) as i64 * reduce(l, q) as i64, q);
    let second = mul_mod(pinv, nl, q);
    let mut acc = Accumulator::new();
    let mut terms = 0;
    for a in 0..q {
        let chi_a = chi.eval(a as i64);
        if chi_a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let s = kloosterman_on(&units, &roots, mul_mod(pinv, a, q), second);
        let phase = roots.get((q - mul_mod(pinv, (a + nl) % q, q)) % q);
        acc.add(chi_a * s.value * phase);
        terms += s.terms;
    }
    let mut out = acc.finish();
    out.terms = terms;
    Ok(out)
}

/// `c·g_χ·χ(pc)·𝔇(\overline{pc}nℓ; M)`.
pub fn offdiagonal_sum_closed(
    chi: &DirichletCharacter,
    p: u64,
    c: u64,
    n: i64,
    l: i64,
) -> Result<ExpSumValue> {
    if gcd(c, chi.modulus()) != 1 {
        return Err(Error::SharedFactor {
            p: chi.modulus(),
            modulus: c,
        });
    }
    Ok(c2_closed(chi, p, c, n, l)?.scale(Complex64::new(c as f64, 0.0)))
}
