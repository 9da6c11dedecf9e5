//! The sum `𝔇(u; M)` and the correlation `𝔠₃` of two of its dilates.

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::num::{gcd_i, mod_inv, mul_mod, reduce};
use crate::summation::{Accumulator, ExpSumValue, Roots};

fn require_non_principal(chi: &DirichletCharacter) -> Result<()> {
    if chi.is_principal() {
        Err(Error::PrincipalCharacter)
    } else {
        Ok(())
    }
}

/// `𝔇(u; M) = Σ_{b mod M, (b(b−1), M) = 1} χ̄(b−1) e((b̄−1)u/M)`.
pub fn d_sum(u: i64, chi: &DirichletCharacter) -> Result<ExpSumValue> {
    require_non_principal(chi)?;
    let m = chi.modulus();
    let roots = Roots::of(m);
    let chibar = chi.conj();
    let u = reduce(u, m);
    Ok(d_sum_on(&chibar, &roots, m, u))
}

fn d_sum_on(chibar: &DirichletCharacter, roots: &Roots, m: u64, u: u64) -> ExpSumValue {
    let mut acc = Accumulator::new();
    for b in 2..m {
        let binv = mod_inv(b as i64, m).expect("prime modulus");
        let k = mul_mod((binv + m - 1) % m, u, m);
        acc.add(chibar.eval(b as i64 - 1) * roots.get(k));
    }
    acc.finish()
}

/// `𝔇(u; M)` for every `u` in `0..M`.
pub fn d_sum_all(chi: &DirichletCharacter) -> Result<Vec<ExpSumValue>> {
    require_non_principal(chi)?;
    let m = chi.modulus();
    let roots = Roots::of(m);
    let chibar = chi.conj();
    // 𝔇(u) = Σ_t w_t e(t u / M) with t = b̄ − 1
    let weights: Vec<(u64, Complex64)> = (2..m)
        .map(|b| {
            let binv = mod_inv(b as i64, m).expect("prime modulus");
            ((binv + m - 1) % m, chibar.eval(b as i64 - 1))
        })
        .collect();
    Ok((0..m)
        .map(|u| {
            let mut acc = Accumulator::new();
            for &(t, w) in &weights {
                acc.add(w * roots.get(mul_mod(t, u, m)));
            }
            acc.finish()
        })
        .collect())
}

fn require_unit(v: i64, m: u64) -> Result<()> {
    if gcd_i(v, m) != 1 {
        Err(Error::NotUnit { v, m })
    } else {
        Ok(())
    }
}

/// `𝔠₃ = Σ_{a mod M} 𝔇(a; M)·conj(𝔇(v̄a; M))`, the square-opened correlation
/// whose dilation ratio is `v`, summed directly over `a`.
pub fn c3_raw(v: i64, chi: &DirichletCharacter) -> Result<ExpSumValue> {
    require_non_principal(chi)?;
    let m = chi.modulus();
    require_unit(v, m)?;
    let vinv = mod_inv(v, m)?;
    let table = d_sum_all(chi)?;
    let mut acc = Accumulator::new();
    let mut est = 0.0;
    let mut terms = 0u64;
    for a in 0..m {
        let x = table[a as usize];
        let y = table[mul_mod(vinv, a, m) as usize];
        acc.add(x.value * y.value.conj());
        est += x.norm() * y.est_error + y.norm() * x.est_error;
        terms += x.terms * y.terms;
    }
    let mut out = acc.finish();
    out.est_error += est;
    out.terms = terms;
    Ok(out)
}

/// `𝔠₃` after the `a`-sum has been executed:
/// `M·Σ_{b, b'} χ̄(b−1)χ(b'−1)` over admissible `b, b'` with `b̄' ≡ 1 + (b̄−1)v`.
pub fn c3_paired(v: i64, chi: &DirichletCharacter) -> Result<ExpSumValue> {
    require_non_principal(chi)?;
    let m = chi.modulus();
    require_unit(v, m)?;
    let v = reduce(v, m);
    let chibar = chi.conj();
    let mut acc = Accumulator::new();
    for b in 2..m {
        let binv = mod_inv(b as i64, m)?;
        let bprime_inv = (1 + mul_mod((binv + m - 1) % m, v, m)) % m;
        if bprime_inv == 0 {
            acc.skip();
            continue;
        }
        let bprime = mod_inv(bprime_inv as i64, m)?;
        if bprime == 1 {
            acc.skip();
            continue;
        }
        acc.add(chibar.eval(b as i64 - 1) * chi.eval(bprime as i64 - 1));
    }
    Ok(acc.finish().scale(Complex64::new(m as f64, 0.0)))
}

/// Closed form `𝔠₃ = M·Σ_{b mod M, (b(b−1),M)=1} χ̄(1 + b(v̄−1))`.
pub fn c3_closed(v: i64, chi: &DirichletCharacter) -> Result<ExpSumValue> {
    require_non_principal(chi)?;
    let m = chi.modulus();
    require_unit(v, m)?;
    let vinv = mod_inv(v, m)?;
    let chibar = chi.conj();
    let step = (vinv + m - 1) % m;
    let mut acc = Accumulator::new();
    for b in 2..m {
        let arg = (1 + mul_mod(b, step, m)) % m;
        acc.add(chibar.eval(arg as i64));
    }
    Ok(acc.finish().scale(Complex64::new(m as f64, 0.0)))
}

/// The value of `𝔠₃` at `v ≡ 1`: `M(M − 2)`.
pub fn c3_diagonal(m: u64) -> i64 {
    (m * (m - 2)) as i64
}
