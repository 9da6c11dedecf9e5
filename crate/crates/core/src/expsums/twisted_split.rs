//! Splitting `S_ψ(np²M, rℓ; cpM)` along `cpM = cp · M`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kloosterman::{kloosterman, twisted_kloosterman};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::num::{gcd, gcd_i, is_prime, mod_inv};
use crate::summation::ExpSumValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedSplitParams {
    pub n: i64,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub r: i64,
    pub l: i64,
    pub c: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistedSplit {
    /// `S_ψ(np²M, rℓ; cpM)`
    pub lhs: ExpSumValue,
    /// `−S_ψ(np², rℓM̄; cp)`, or the vanishing value 0 when `M | c`.
    pub rhs1: ExpSumValue,
    /// `−ψ(rℓ)ψ̄(cM)g_ψ̄·S(n, rℓM̄; c)`; present only when `p ∤ c`, `p ∤ rℓ`, `M ∤ c`.
    pub rhs2: Option<ExpSumValue>,
}

pub fn twisted_split_check(
    params: &TwistedSplitParams,
    psi: &DirichletCharacter,
) -> Result<TwistedSplit> {
    let p = psi.modulus();
    let big_m = params.big_m;
    if big_m < 3 || !is_prime(big_m) {
        return Err(Error::NotPrime(big_m));
    }
    if p == big_m {
        return Err(Error::ParameterInconsistency("p must differ from M".into()));
    }
    if params.c == 0 {
        return Err(Error::OutOfRange("c must be positive".into()));
    }
    let rl = params.r as i128 * params.l as i128;
    let rl = i64::try_from(rl).map_err(|_| Error::OutOfRange("rℓ overflows".into()))?;
    if gcd_i(rl, big_m) != 1 {
        return Err(Error::ParameterInconsistency(format!(
            "rℓ={rl} shares a factor with M={big_m}"
        )));
    }
    let (c, n) = (params.c, params.n);
    let p2 = (p * p) as i64;
    let np2 = n
        .checked_mul(p2)
        .ok_or_else(|| Error::OutOfRange("np² overflows".into()))?;
    let lhs = twisted_kloosterman(psi, np2.wrapping_mul(big_m as i64), rl, c * p * big_m)?;
    if c % big_m == 0 {
        return Ok(TwistedSplit {
            lhs,
            rhs1: ExpSumValue::zero(lhs.terms),
            rhs2: None,
        });
    }
    let cp = c * p;
    let minv_cp = mod_inv(big_m as i64, cp)? as i128;
    let b1 = (rl as i128 * minv_cp % cp as i128) as i64;
    let rhs1 = twisted_kloosterman(psi, np2, b1, cp)?.neg();
    let rhs2 = if gcd(c, p) == 1 && gcd_i(rl, p) == 1 {
        let minv_c = mod_inv(big_m as i64, c)? as i128;
        let b2 = (rl as i128 * minv_c % c.max(1) as i128) as i64;
        let s = kloosterman(n, b2, c)?;
        let cm = (c % p) as i128 * (big_m % p) as i128 % p as i128;
        let factor: Complex64 =
            psi.eval(rl) * psi.conj().eval(cm as i64) * gauss_sum(&psi.conj())?.value;
        Some(s.scale(-factor))
    } else {
        None
    };
    Ok(TwistedSplit { lhs, rhs1, rhs2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::summation::identity_holds;

    #[test]
    fn small_instance_all_characters() {
        let params = TwistedSplitParams {
            n: 1,
            big_m: 5,
            r: 1,
            l: 2,
            c: 2,
        };
        for psi in enumerate_characters(3).unwrap() {
            let s = twisted_split_check(&params, &psi).unwrap();
            assert!(identity_holds(&s.lhs, &s.rhs1));
            assert!(identity_holds(&s.rhs1, &s.rhs2.unwrap()));
        }
    }

    #[test]
    fn vanishes_when_m_divides_c() {
        let params = TwistedSplitParams {
            n: 2,
            big_m: 5,
            r: 3,
            l: 2,
            c: 5,
        };
        for psi in enumerate_characters(3).unwrap() {
            let s = twisted_split_check(&params, &psi).unwrap();
            assert!(s.lhs.norm() < 1e-9);
            assert!(s.rhs2.is_none());
        }
    }

    #[test]
    fn p_dividing_c_gates_rhs2() {
        let params = TwistedSplitParams {
            n: 1,
            big_m: 7,
            r: 1,
            l: 2,
            c: 3,
        };
        let psi = DirichletCharacter::legendre(3).unwrap();
        let s = twisted_split_check(&params, &psi).unwrap();
        assert!(identity_holds(&s.lhs, &s.rhs1));
        assert!(s.rhs2.is_none());
    }

    #[test]
    fn rejects_rl_sharing_factor_with_m() {
        let params = TwistedSplitParams {
            n: 1,
            big_m: 5,
            r: 5,
            l: 2,
            c: 2,
        };
        let psi = DirichletCharacter::legendre(3).unwrap();
        assert!(matches!(
            twisted_split_check(&params, &psi),
            Err(Error::ParameterInconsistency(_))
        ));
    }
}
