//! The restricted sum left after Voronoi summation on the `n`-sum:
//!
//! `Σ*_{β mod mc/m', rℓM̄ + βm' ≡ 0 mod c/d} e(β̄n/(mc/m'))`
//!
//! and its evaluation through the splitting `c/d = c₁c₂`, `m' = c₁m''`,
//! `q = md/m'' = q₁q₂` with `(q₁, c₂) = 1` and `q₂ | c₂^∞`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kloosterman::{check_budget, ramanujan_sum, KLOOSTERMAN_BUDGET};
use crate::error::{Error, Result};
use crate::num::{gcd, mod_inv, mul_mod, reduce, split_by_support, UnitTable};
use crate::summation::{unit_root, Accumulator, ExpSumValue, Roots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoronoiParams {
    pub n: i64,
    pub m: u64,
    pub m_prime: u64,
    pub c: u64,
    pub d: u64,
    pub r: u64,
    pub l: u64,
    #[serde(rename = "M")]
    pub big_m: u64,
}

/// Moduli derived from [`VoronoiParams`] once `c` has been replaced by `cd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoronoiSplit {
    pub c1: u64,
    pub c2: u64,
    pub m2: u64,
    pub q: u64,
    pub q1: u64,
    pub q2: u64,
}

impl VoronoiParams {
    fn check(&self) -> Result<()> {
        let bad = |s: String| Err(Error::ParameterInconsistency(s));
        if self.m == 0 || self.m_prime == 0 || self.c == 0 || self.d == 0 || self.l == 0 {
            return bad("m, m', c, d, l must be positive".into());
        }
        if self.c % self.d != 0 {
            return bad(format!("d={} does not divide c={}", self.d, self.c));
        }
        if (self.m * self.c) % self.m_prime != 0 {
            return bad(format!("m'={} does not divide mc={}", self.m_prime, self.m * self.c));
        }
        if gcd(self.big_m, self.c / self.d) != 1 {
            return bad(format!("M={} not invertible mod c/d={}", self.big_m, self.c / self.d));
        }
        Ok(())
    }

    /// Modulus of the β-sum, `mc/m'`.
    pub fn beta_modulus(&self) -> u64 {
        self.m * self.c / self.m_prime
    }

    pub fn split(&self) -> Result<VoronoiSplit> {
        self.check()?;
        let c = self.c / self.d;
        let c1 = gcd(self.m_prime, c);
        let c2 = c / c1;
        let m2 = self.m_prime / c1;
        if (self.m * self.d) % m2 != 0 {
            return Err(Error::ParameterInconsistency(format!(
                "m''={m2} does not divide md={}",
                self.m * self.d
            )));
        }
        let q = self.m * self.d / m2;
        let (q1, q2) = split_by_support(q, c2)?;
        Ok(VoronoiSplit {
            c1,
            c2,
            m2,
            q,
            q1,
            q2,
        })
    }
}

/// Direct enumeration of β.
pub fn voronoi_char_sum_raw(params: &VoronoiParams) -> Result<ExpSumValue> {
    params.check()?;
    let modulus = params.beta_modulus();
    check_budget(modulus, KLOOSTERMAN_BUDGET)?;
    let cong = params.c / params.d;
    let minv = mod_inv(params.big_m as i64, cong)?;
    let shift = mul_mod(mul_mod(params.r % cong, params.l % cong, cong), minv, cong);
    let mprime = params.m_prime % cong;
    let units = UnitTable::new(modulus)?;
    let roots = Roots::of(modulus);
    let n = reduce(params.n, modulus);
    let mut acc = Accumulator::new();
    for &(beta, beta_inv) in &units.pairs {
        if cong > 1 && (shift + mul_mod(beta % cong, mprime, cong)) % cong != 0 {
            continue;
        }
        acc.add(roots.get(mul_mod(beta_inv, n, modulus)));
    }
    Ok(acc.finish())
}

/// `q₂·𝔠_{q₁}(n)·e(−\overline{r'ℓ}m''Mn/(qc₂))` when `c₁ | r` and `q₂ | n`, zero otherwise.
///
/// The phase is evaluated with the lift of `\overline{r'ℓ}` that vanishes
/// modulo `q₁`, which makes it `e(−\overline{r'ℓ}·m''·M·q̄₁·(n/q₂)/c₂)` with
/// all inverses modulo `c₂`. Requires the generic case `ℓ ∤ c₁`.
pub fn voronoi_char_sum_closed(params: &VoronoiParams) -> Result<ExpSumValue> {
    let s = params.split()?;
    if s.c1 % params.l == 0 {
        return Err(Error::ParameterInconsistency(format!(
            "l={} divides c1={}",
            params.l, s.c1
        )));
    }
    let terms = UnitTable::new(params.beta_modulus())?.pairs.len() as u64;
    if params.r % s.c1 != 0 || params.n.rem_euclid(s.q2 as i64) != 0 {
        return Ok(ExpSumValue::zero(terms));
    }
    let r_prime = params.r / s.c1;
    let rl = (r_prime % s.c2) as u128 * (params.l % s.c2) as u128 % s.c2.max(1) as u128;
    if gcd(rl as u64, s.c2) != 1 {
        // no β can satisfy the congruence with β a unit
        return Ok(ExpSumValue::zero(terms));
    }
    let n_red = params.n / s.q2 as i64;
    let ram = ramanujan_sum(s.q1, params.n)? as f64;
    let c2 = s.c2;
    let phase = if c2 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        let rl_inv = mod_inv(rl as i64, c2)?;
        let q1_inv = mod_inv(s.q1 as i64, c2)?;
        let mut k = mul_mod(rl_inv, s.m2 % c2, c2);
        k = mul_mod(k, params.big_m % c2, c2);
        k = mul_mod(k, q1_inv, c2);
        k = mul_mod(k, reduce(n_red, c2), c2);
        unit_root((c2 - k) % c2, c2)
    };
    let value = phase * (s.q2 as f64 * ram);
    Ok(ExpSumValue {
        value,
        terms,
        est_error: 4.0 * f64::EPSILON * value.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summation::identity_holds;

    fn params(n: i64, m: u64, m_prime: u64, c: u64, d: u64, r: u64, l: u64) -> VoronoiParams {
        VoronoiParams {
            n,
            m,
            m_prime,
            c,
            d,
            r,
            l,
            big_m: 7,
        }
    }

    #[test]
    fn split_example() {
        // c/d = 12, m' = 8: c1 = 4, c2 = 3, m'' = 2, q = m d / m'' = 3·2/2 = 3 → q2 = 3
        let p = params(1, 3, 8, 24, 2, 4, 5);
        let s = p.split().unwrap();
        assert_eq!((s.c1, s.c2, s.m2, s.q, s.q1, s.q2), (4, 3, 2, 3, 1, 3));
    }

    #[test]
    fn vanishes_unless_c1_divides_r() {
        let p = params(3, 3, 8, 24, 2, 2, 5);
        assert_eq!(p.split().unwrap().c1, 4);
        assert_eq!(voronoi_char_sum_closed(&p).unwrap().value, Complex64::new(0.0, 0.0));
        assert!(voronoi_char_sum_raw(&p).unwrap().norm() < 1e-12);
    }

    #[test]
    fn vanishes_unless_q2_divides_n() {
        let p = params(1, 3, 8, 24, 2, 4, 5);
        assert_eq!(voronoi_char_sum_closed(&p).unwrap().value, Complex64::new(0.0, 0.0));
        assert!(voronoi_char_sum_raw(&p).unwrap().norm() < 1e-12);
    }

    #[test]
    fn raw_matches_closed_small() {
        for p in [
            params(3, 3, 8, 24, 2, 4, 5),
            params(6, 5, 2, 12, 3, 2, 7),
            params(10, 6, 3, 9, 1, 3, 2),
            params(0, 4, 1, 10, 5, 1, 3),
        ] {
            let raw = voronoi_char_sum_raw(&p).unwrap();
            let closed = voronoi_char_sum_closed(&p).unwrap();
            assert!(identity_holds(&raw, &closed), "{p:?}: {raw:?} vs {closed:?}");
        }
    }

    #[test]
    fn inconsistent_parameters() {
        assert!(matches!(
            voronoi_char_sum_raw(&params(1, 3, 8, 24, 5, 4, 5)),
            Err(Error::ParameterInconsistency(_))
        ));
        // l | c1
        assert!(matches!(
            voronoi_char_sum_closed(&params(1, 1, 5, 5, 1, 5, 5)),
            Err(Error::ParameterInconsistency(_))
        ));
    }
}
