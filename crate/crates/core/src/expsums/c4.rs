//! Correlation of two Kloosterman sums with moduli `r'ℓ` and `r'ℓ'` against
//! an additive character modulo `r'ℓℓ'`.

use serde::{Deserialize, Serialize};

use super::kloosterman::{check_budget, kloosterman_on};
use crate::error::{Error, Result};
use crate::num::{gcd, gcd_i, mod_inv, mul_mod, reduce, UnitTable};
use crate::summation::{Accumulator, ExpSumValue, Roots};

/// Budget on `r'ℓℓ' + (r'ℓ)² + (r'ℓ')²`.
pub const C4_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct C4Params {
    pub c2: i64,
    /// Product of the distinct primes of `q₂`.
    pub q2_radical: u64,
    pub p: u64,
    pub p_prime: u64,
    pub q1: u64,
    /// `m''`
    pub m2: i64,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub h: i64,
    pub n: i64,
    pub r_prime: u64,
    pub l: u64,
    pub l_prime: u64,
}

/// The two Kloosterman arguments for one modulus: `S(first, second·a; modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C4Factor {
    pub modulus: u64,
    pub first: u64,
    pub second: u64,
}

impl C4Params {
    pub fn modulus(&self) -> u64 {
        self.r_prime * self.l * self.l_prime
    }

    fn factor(&self, ell: u64, p: u64) -> Result<C4Factor> {
        let modulus = self.r_prime * ell;
        let inv = |x: i64, what: &str| {
            mod_inv(x, modulus).map_err(|_| {
                Error::ParameterInconsistency(format!("{what}={x} not invertible mod {modulus}"))
            })
        };
        let pinv = inv(p as i64, "p")?;
        let q1inv = inv(self.q1 as i64, "q1")?;
        let q2inv = inv(self.q2_radical as i64, "q2~")?;
        let first = (reduce(self.c2, modulus) + modulus
            - mul_mod(self.q2_radical % modulus, pinv, modulus))
            % modulus;
        let mut second = mul_mod(q1inv, q2inv, modulus);
        for f in [self.m2, self.big_m as i64, self.h] {
            second = mul_mod(second, reduce(f, modulus), modulus);
        }
        Ok(C4Factor {
            modulus,
            first,
            second,
        })
    }

    pub fn factors(&self) -> Result<(C4Factor, C4Factor)> {
        if self.r_prime == 0 || self.l == 0 || self.l_prime == 0 {
            return Err(Error::OutOfRange("moduli must be positive".into()));
        }
        Ok((self.factor(self.l, self.p)?, self.factor(self.l_prime, self.p_prime)?))
    }

    /// Square-root scale for `𝔠₄`: `(r'ℓℓ')^{1/2}` times the size of the two
    /// Kloosterman factors `(r'ℓ)^{1/2}(r'ℓ')^{1/2}`, times the gcd factors
    /// `gcd(A, r'ℓ)^{1/2} gcd(A', r'ℓ')^{1/2} gcd(n, r'ℓℓ')^{1/2}`.
    pub fn square_root_scale(&self) -> Result<f64> {
        let (f1, f2) = self.factors()?;
        let q = self.modulus();
        let g1 = gcd(f1.first, f1.modulus) as f64;
        let g2 = gcd(f2.first, f2.modulus) as f64;
        let gn = if self.n == 0 { q } else { gcd_i(self.n, q) } as f64;
        Ok((q as f64 * f1.modulus as f64 * f2.modulus as f64 * g1 * g2 * gn).sqrt())
    }
}

/// `𝔠₄ = Σ_{a mod r'ℓℓ'} S(c₂ − q̃₂p̄, K a; r'ℓ) S(c₂ − q̃₂p̄', K a; r'ℓ') e(an/(r'ℓℓ'))`
/// with `K = q̄₁ q̃₂⁻¹ m'' M h`, inverses taken modulo the respective Kloosterman modulus.
pub fn c4_correlation(params: &C4Params) -> Result<ExpSumValue> {
    let (f1, f2) = params.factors()?;
    let q = params.modulus();
    check_budget(q + f1.modulus * f1.modulus + f2.modulus * f2.modulus, C4_BUDGET)?;
    let s1 = kloosterman_row(&f1)?;
    let s2 = kloosterman_row(&f2)?;
    let roots = Roots::of(q);
    let n = reduce(params.n, q);
    let mut acc = Accumulator::new();
    let mut est = 0.0;
    let mut terms = 0u64;
    for a in 0..q {
        let x = &s1[(a % f1.modulus) as usize];
        let y = &s2[(a % f2.modulus) as usize];
        acc.add(x.value * y.value * roots.get(mul_mod(a, n, q)));
        est += x.norm() * y.est_error + y.norm() * x.est_error;
        terms += x.terms * y.terms;
    }
    let mut out = acc.finish();
    out.est_error += est;
    out.terms = terms;
    Ok(out)
}

fn kloosterman_row(f: &C4Factor) -> Result<Vec<ExpSumValue>> {
    let units = UnitTable::new(f.modulus)?;
    let roots = Roots::of(f.modulus);
    Ok((0..f.modulus)
        .map(|a| kloosterman_on(&units, &roots, f.first, mul_mod(f.second, a, f.modulus)))
        .collect())
}
