//! Exact integer, residue and rational-angle arithmetic.
//!
//! Moduli are `u64` values bounded by [`MAX_MODULUS`]; every product of two
//! residues is formed in `u128`, so nothing here wraps. Inputs beyond the
//! bounds are rejected with [`Error::OutOfRange`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus (and rational-angle denominator) accepted.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Largest integer accepted by [`factorize`].
pub const MAX_FACTOR_INPUT: u64 = 1 << 40;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i64, b: u64) -> u64 {
    gcd(a.unsigned_abs(), b)
}

/// Least non-negative residue of `a` modulo `m`.
pub fn reduce(a: i64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let r = (a as i128).rem_euclid(m as i128);
    r as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, in `[0, m)`. By convention the inverse modulo 1 is 0.
pub fn mod_inv(a: i64, m: u64) -> Result<u64> {
    if m == 0 || m > MAX_MODULUS {
        return Err(Error::OutOfRange(format!("modulus {m}")));
    }
    if m == 1 {
        return Ok(0);
    }
    let a_red = reduce(a, m);
    let (mut old_r, mut r) = (a_red as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Primes in the half-open range `[lo, hi)`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..hi).filter(|&n| is_prime(n)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn recompose(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::OutOfRange("cannot factor 0".into()));
    }
    if n > MAX_FACTOR_INPUT {
        return Err(Error::OutOfRange(format!("{n} exceeds 2^40")));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut d = 5u64;
    while d * d <= rest {
        push(d, &mut rest);
        push(d + 2, &mut rest);
        d += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithmeticValues {
    pub totient: u64,
    pub mobius: i8,
    pub divisors: u64,
}

/// Euler's totient, the Möbius function and the divisor count of `n`.
pub fn arithmetic_functions(n: u64) -> Result<ArithmeticValues> {
    let f = factorize(n)?;
    Ok(arithmetic_from(&f))
}

pub fn arithmetic_from(f: &Factorization) -> ArithmeticValues {
    let mut totient = 1u64;
    let mut divisors = 1u64;
    for &(p, e) in &f.factors {
        totient *= (p - 1) * p.pow(e - 1);
        divisors *= e as u64 + 1;
    }
    let mobius = if f.is_squarefree() {
        if f.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        0
    };
    ArithmeticValues {
        totient,
        mobius,
        divisors,
    }
}

pub fn totient(n: u64) -> Result<u64> {
    arithmetic_functions(n).map(|a| a.totient)
}

pub fn mobius(n: u64) -> Result<i8> {
    arithmetic_functions(n).map(|a| a.mobius)
}

pub fn divisor_count(n: u64) -> Result<u64> {
    arithmetic_functions(n).map(|a| a.divisors)
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    let mut out = vec![1u64];
    for &(p, e) in &f.factors {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Splits `n = a * b` where `b` collects every prime power of `n` whose prime divides `m`.
pub fn split_by_support(n: u64, m: u64) -> Result<(u64, u64)> {
    let f = factorize(n)?;
    let mut inside = 1u64;
    for &(p, e) in &f.factors {
        if m % p == 0 {
            inside *= p.pow(e);
        }
    }
    Ok((n / inside, inside))
}

/// The count `Σ_{P<p<2P} Σ_{ψ mod p} (1 − ψ(−1))`, i.e. `Σ (p − 1)` over primes in `(P, 2P)`.
pub fn p_star(big_p: u64) -> u64 {
    primes_between(big_p + 1, 2 * big_p)
        .into_iter()
        .map(|p| p - 1)
        .sum()
}

/// An exact element of Q/Z, stored reduced with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalAngle {
    num: u64,
    den: u64,
}

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle { num: 0, den: 1 };

    pub fn new(num: i128, den: u64) -> Result<Self> {
        if den == 0 || den > MAX_MODULUS {
            return Err(Error::OutOfRange(format!("angle denominator {den}")));
        }
        let r = num.rem_euclid(den as i128) as u64;
        let g = gcd(r, den);
        Ok(RationalAngle {
            num: r / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn neg(self) -> Self {
        if self.num == 0 {
            self
        } else {
            RationalAngle {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }

    pub fn add(self, other: Self) -> Result<Self> {
        let g = gcd(self.den, other.den);
        let lcm = (self.den / g) as u128 * other.den as u128;
        if lcm > MAX_MODULUS as u128 {
            return Err(Error::OutOfRange(format!(
                "angle denominator {lcm} exceeds 2^62"
            )));
        }
        let lcm = lcm as u64;
        let a = self.num as u128 * (lcm / self.den) as u128;
        let b = other.num as u128 * (lcm / other.den) as u128;
        RationalAngle::new(((a + b) % lcm as u128) as i128, lcm)
    }

    pub fn sub(self, other: Self) -> Result<Self> {
        self.add(other.neg())
    }

    pub fn scale(self, k: i64) -> Self {
        let kk = reduce(k, self.den);
        let num = mul_mod(self.num, kk, self.den);
        RationalAngle::new(num as i128, self.den).expect("denominator already valid")
    }

    /// The point `e(self) = exp(2πi·self)` on the unit circle.
    pub fn unit(self) -> num_complex::Complex64 {
        crate::summation::unit_root(self.num, self.den)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub fn angle_add(a: RationalAngle, b: RationalAngle) -> Result<RationalAngle> {
    a.add(b)
}

/// Iterates over the units modulo `c` together with their inverses, ascending in `x`.
/// For `c = 1` the single residue 0 is yielded with inverse 0.
#[derive(Debug, Clone)]
pub struct UnitTable {
    pub modulus: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl UnitTable {
    pub fn new(c: u64) -> Result<Self> {
        if c == 0 || c > MAX_MODULUS {
            return Err(Error::OutOfRange(format!("modulus {c}")));
        }
        if c == 1 {
            return Ok(UnitTable {
                modulus: 1,
                pairs: vec![(0, 0)],
            });
        }
        let pairs = (1..c)
            .filter(|&x| gcd(x, c) == 1)
            .map(|x| (x, mod_inv(x as i64, c).expect("unit")))
            .collect();
        Ok(UnitTable { modulus: c, pairs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(1, 7), Ok(1));
        assert_eq!(mod_inv(3, 7), Ok(5));
        assert_eq!(mod_inv(2, 4), Err(Error::NotInvertible { a: 2, m: 4 }));
        assert_eq!(mod_inv(5, 1), Ok(0));
        assert_eq!(mod_inv(-1, 7), Ok(6));
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert_eq!(
            factorize(1386).unwrap().factors,
            vec![(2, 1), (3, 2), (7, 1), (11, 1)]
        );
        assert!(matches!(factorize((1 << 40) + 1), Err(Error::OutOfRange(_))));
        let big = factorize((1 << 40) - 87).unwrap();
        assert_eq!(big.recompose(), (1 << 40) - 87);
    }

    #[test]
    fn arithmetic_examples() {
        let v = |n| {
            let a = arithmetic_functions(n).unwrap();
            (a.totient, a.mobius, a.divisors)
        };
        assert_eq!(v(1), (1, 1, 1));
        assert_eq!(v(4), (2, 0, 3));
        assert_eq!(v(154), (60, -1, 8));
    }

    #[test]
    fn angle_examples() {
        let a = |n, d| RationalAngle::new(n, d).unwrap();
        assert_eq!(angle_add(a(1, 3), a(2, 3)).unwrap(), RationalAngle::ZERO);
        assert_eq!(angle_add(a(2, 5), a(3, 5)).unwrap(), RationalAngle::ZERO);
        assert_eq!(angle_add(a(2, 5), a(1, 15)).unwrap(), a(7, 15));
        assert_eq!(a(-1, 4), a(3, 4));
        let big = a(1, (1 << 62) - 57);
        assert!(matches!(big.add(a(1, 3)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn p_star_examples() {
        assert_eq!(p_star(1), 0);
        assert_eq!(p_star(2), 2);
        assert_eq!(p_star(5), 6);
        // primes in (10, 20): 11, 13, 17, 19
        assert_eq!(p_star(10), 10 + 12 + 16 + 18);
    }

    #[test]
    fn divisors_and_split() {
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(split_by_support(360, 6).unwrap(), (5, 72));
        assert_eq!(split_by_support(7, 6).unwrap(), (7, 1));
    }

    #[test]
    fn unit_table_small() {
        let t = UnitTable::new(10).unwrap();
        assert_eq!(t.pairs, vec![(1, 1), (3, 7), (7, 3), (9, 9)]);
        assert_eq!(UnitTable::new(1).unwrap().pairs, vec![(0, 0)]);
    }
}
