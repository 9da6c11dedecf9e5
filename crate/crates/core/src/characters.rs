//! Dirichlet characters modulo odd primes.
//!
//! A character is stored as an index `a` against the smallest primitive root
//! `g`; its value at `g^k` is `e(a·k/(q−1))`. The discrete-log table for each
//! modulus is built on first use and shared by every character of that modulus.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{factorize, is_prime, mul_mod, pow_mod, reduce};
use crate::summation::{Accumulator, ExpSumValue, Roots};

/// Largest prime modulus for which a discrete-log table is built.
pub const MAX_CHARACTER_MODULUS: u64 = 1 << 24;

/// Discrete logarithms and roots of unity for one prime modulus.
pub struct CharacterTable {
    pub modulus: u64,
    pub generator: u64,
    log: Vec<u32>,
    roots: Roots,
}

impl CharacterTable {
    fn build(q: u64) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q > MAX_CHARACTER_MODULUS {
            return Err(Error::OutOfRange(format!("character modulus {q}")));
        }
        let g = primitive_root(q)?;
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for k in 0..q - 1 {
            log[x as usize] = k as u32;
            x = mul_mod(x, g, q);
        }
        Ok(CharacterTable {
            modulus: q,
            generator: g,
            log,
            roots: Roots::of(q - 1),
        })
    }

    /// `log_g(n)` for `n` coprime to the modulus.
    pub fn log(&self, n: i64) -> Option<u64> {
        let r = reduce(n, self.modulus);
        if r == 0 {
            None
        } else {
            Some(self.log[r as usize] as u64)
        }
    }
}

fn table_cache() -> &'static RwLock<HashMap<u64, Arc<CharacterTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CharacterTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn character_table(q: u64) -> Result<Arc<CharacterTable>> {
    if let Some(t) = table_cache().read().expect("table cache poisoned").get(&q) {
        return Ok(Arc::clone(t));
    }
    let built = Arc::new(CharacterTable::build(q)?);
    let mut w = table_cache().write().expect("table cache poisoned");
    Ok(Arc::clone(w.entry(q).or_insert(built)))
}

/// Smallest primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> Result<u64> {
    if q < 2 || !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q == 2 {
        return Ok(1);
    }
    let order = q - 1;
    let primes: Vec<u64> = factorize(order)?.primes().collect();
    (2..q)
        .find(|&g| primes.iter().all(|&r| pow_mod(g, order / r, q) != 1))
        .ok_or(Error::NotPrime(q))
}

#[derive(Clone)]
pub struct DirichletCharacter {
    index: u64,
    table: Arc<CharacterTable>,
}

impl DirichletCharacter {
    pub fn new(q: u64, index: u64) -> Result<Self> {
        let table = character_table(q)?;
        if index >= q - 1 {
            return Err(Error::OutOfRange(format!(
                "character index {index} modulo {q}"
            )));
        }
        Ok(DirichletCharacter { index, table })
    }

    pub fn principal(q: u64) -> Result<Self> {
        Self::new(q, 0)
    }

    /// The quadratic (Legendre) character.
    pub fn legendre(q: u64) -> Result<Self> {
        Self::new(q, (q - 1) / 2)
    }

    pub fn modulus(&self) -> u64 {
        self.table.modulus
    }

    pub fn generator(&self) -> u64 {
        self.table.generator
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn order_of_group(&self) -> u64 {
        self.table.modulus - 1
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    pub fn conj(&self) -> Self {
        let n = self.order_of_group();
        DirichletCharacter {
            index: (n - self.index) % n,
            table: Arc::clone(&self.table),
        }
    }

    /// Exponent `j` with `χ(n) = e(j/(q−1))`, or `None` when `q | n`.
    #[inline]
    pub fn exponent(&self, n: i64) -> Option<u64> {
        let k = self.table.log(n)?;
        Some(mul_mod(self.index, k, self.order_of_group()))
    }

    #[inline]
    pub fn eval(&self, n: i64) -> Complex64 {
        match self.exponent(n) {
            Some(j) => self.table.roots.get(j),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `χ(−1)`, computed exactly: `−1 = g^((q−1)/2)`, so `χ(−1) = (−1)^index`.
    pub fn parity(&self) -> i8 {
        if self.index % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == -1
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.index == other.index
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus())
            .field("generator", &self.generator())
            .field("index", &self.index)
            .finish()
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            modulus: u64,
            generator: u64,
            index: u64,
        }
        Repr {
            modulus: self.modulus(),
            generator: self.generator(),
            index: self.index,
        }
        .serialize(s)
    }
}

/// All `q − 1` characters modulo the odd prime `q`, by ascending index.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    let table = character_table(q)?;
    Ok((0..q - 1)
        .map(|index| DirichletCharacter {
            index,
            table: Arc::clone(&table),
        })
        .collect())
}

pub const MAX_GAUSS_MODULUS: u64 = 1_000_000;

/// `g_χ = Σ_{a mod q} χ(a) e(a/q)` by direct summation.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<ExpSumValue> {
    let q = chi.modulus();
    if q > MAX_GAUSS_MODULUS {
        return Err(Error::BudgetExceeded {
            needed: q,
            budget: MAX_GAUSS_MODULUS,
        });
    }
    let additive = Roots::of(q);
    let mut acc = Accumulator::new();
    acc.skip();
    for a in 1..q {
        acc.add(chi.eval(a as i64) * additive.get(a));
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_characters(3).unwrap().len(), 2);
        let five = enumerate_characters(5).unwrap();
        assert_eq!(five.len(), 4);
        assert_eq!(five.iter().filter(|c| c.is_odd()).count(), 2);
        assert_eq!(enumerate_characters(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(enumerate_characters(2).unwrap_err(), Error::NotPrime(2));
    }

    #[test]
    fn eval_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(DirichletCharacter::principal(5).unwrap().eval(3), one);
        for chi in enumerate_characters(7).unwrap() {
            assert_eq!(chi.eval(7), Complex64::new(0.0, 0.0));
            assert_eq!(chi.eval(0), Complex64::new(0.0, 0.0));
        }
        // squares mod 7 are {1, 2, 4}
        let leg = DirichletCharacter::legendre(7).unwrap();
        assert_eq!(leg.eval(3), Complex64::new(-1.0, 0.0));
        assert_eq!(leg.eval(2), one);
        assert_eq!(leg.eval(-4), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn parity_examples() {
        assert_eq!(DirichletCharacter::principal(11).unwrap().parity(), 1);
        assert_eq!(DirichletCharacter::legendre(3).unwrap().parity(), -1);
        assert_eq!(DirichletCharacter::new(13, 6).unwrap().parity(), 1);
        for chi in enumerate_characters(13).unwrap() {
            let v = chi.eval(-1);
            assert_eq!(v, Complex64::new(chi.parity() as f64, 0.0));
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let g3 = gauss_sum(&DirichletCharacter::legendre(3).unwrap()).unwrap();
        assert!(close(g3.value, Complex64::new(0.0, 3f64.sqrt()), 1e-14));
        let g5 = gauss_sum(&DirichletCharacter::legendre(5).unwrap()).unwrap();
        assert!(close(g5.value, Complex64::new(5f64.sqrt(), 0.0), 1e-14));
        for q in [3u64, 7, 101] {
            let g = gauss_sum(&DirichletCharacter::principal(q).unwrap()).unwrap();
            assert!(close(g.value, Complex64::new(-1.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(41).unwrap(), 6);
        assert_eq!(primitive_root(191).unwrap(), 19);
    }
}
