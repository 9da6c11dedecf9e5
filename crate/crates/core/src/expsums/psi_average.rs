//! The average `Σ_{ψ mod p} (1 − ψ(−1)) S_ψ(r, m; cpM)` over the odd part of
//! the character group, by direct summation and by exact evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kloosterman::{check_budget, kloosterman, twisted_on, KLOOSTERMAN_BUDGET};
use crate::characters::enumerate_characters;
use crate::error::{Error, Result};
use crate::num::{gcd, is_prime, mod_inv, reduce, UnitTable};
use crate::summation::{unit_root, ExpSumValue, Roots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiAverageParams {
    pub r: i64,
    pub m: i64,
    pub c: u64,
    pub p: u64,
    #[serde(rename = "M")]
    pub big_m: u64,
}

impl PsiAverageParams {
    pub fn new(r: i64, m: i64, c: u64, p: u64, big_m: u64) -> Self {
        PsiAverageParams { r, m, c, p, big_m }
    }

    fn validate(&self) -> Result<()> {
        for q in [self.p, self.big_m] {
            if q < 3 || !is_prime(q) {
                return Err(Error::NotPrime(q));
            }
        }
        if self.p == self.big_m {
            return Err(Error::ParameterInconsistency("p must differ from M".into()));
        }
        if self.c == 0 {
            return Err(Error::OutOfRange("c must be positive".into()));
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.c * self.p * self.big_m
    }
}

/// Direct double summation over every `ψ mod p` and every unit modulo `cpM`.
pub fn psi_average_raw(params: &PsiAverageParams) -> Result<ExpSumValue> {
    params.validate()?;
    let q = params.modulus();
    check_budget(q * (params.p - 1), KLOOSTERMAN_BUDGET)?;
    let units = UnitTable::new(q)?;
    let roots = Roots::of(q);
    let (r, m) = (reduce(params.r, q), reduce(params.m, q));
    let mut total = ExpSumValue::zero(0);
    for psi in enumerate_characters(params.p)? {
        let weight = (1 - psi.parity()) as f64;
        let s = twisted_on(&psi, &units, &roots, r, m);
        let term = if weight == 0.0 {
            ExpSumValue::zero(s.terms)
        } else {
            s.scale(Complex64::new(weight, 0.0))
        };
        total = total.add(term);
    }
    Ok(total)
}

/// Exact orthogonality evaluation
/// `(p−1)·S(p̄r, p̄m; cM)·[e(w) − e(−w)]` with `w = \overline{cM}(r+m)/p`.
pub fn psi_average_closed(params: &PsiAverageParams) -> Result<ExpSumValue> {
    params.validate()?;
    let cm = params.c * params.big_m;
    let p = params.p;
    if gcd(p, cm) != 1 {
        return Err(Error::SharedFactor { p, modulus: cm });
    }
    let pinv = mod_inv(p as i64, cm)? as i64;
    let s = kloosterman(
        (pinv as i128 * params.r as i128 % cm as i128) as i64,
        (pinv as i128 * params.m as i128 % cm as i128) as i64,
        cm,
    )?;
    let cm_inv = mod_inv(cm as i64, p)?;
    let k = (cm_inv as u128 * reduce(params.r + params.m, p) as u128 % p as u128) as u64;
    let bracket = unit_root(k, p) - unit_root((p - k) % p, p);
    Ok(s.scale(bracket * (p - 1) as f64))
}
