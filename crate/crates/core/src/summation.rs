//! Roots of unity and error-tracked complex summation.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type ComplexValue = Complex64;

const EPS: f64 = f64::EPSILON;

/// Denominators up to this size get a cached table of roots of unity.
pub const ROOT_TABLE_CACHE_LIMIT: u64 = 1 << 16;

/// `e(k/d) = exp(2πi·k/d)`, reduced to the first octant before any
/// trigonometry so that conjugate and quarter-turn symmetric points come out
/// exactly symmetric.
pub fn unit_root(k: u64, d: u64) -> Complex64 {
    debug_assert!(d > 0);
    let k = k % d;
    octant_root(k as u128, d as u128)
}

fn octant_root(k: u128, d: u128) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * k > d {
        return octant_root(d - k, d).conj();
    }
    if 4 * k > d {
        // e(1/2 - x) = -conj(e(x))
        return -octant_root(d - 2 * k, 2 * d).conj();
    }
    if 8 * k > d {
        // e(1/4 - y) = i * conj(e(y))
        let z = octant_root(d - 4 * k, 4 * d).conj();
        return Complex64::new(-z.im, z.re);
    }
    let theta = TAU * (k as f64 / d as f64);
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// The `d`-th roots of unity, either from a shared table or computed on demand.
#[derive(Clone)]
pub enum Roots {
    Table(Arc<[Complex64]>),
    Direct(u64),
}

impl Roots {
    pub fn of(d: u64) -> Roots {
        if d <= ROOT_TABLE_CACHE_LIMIT {
            Roots::Table(root_table(d))
        } else {
            Roots::Direct(d)
        }
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        match self {
            Roots::Table(t) => t[(k % t.len() as u64) as usize],
            Roots::Direct(d) => unit_root(k, *d),
        }
    }
}

fn root_cache() -> &'static RwLock<HashMap<u64, Arc<[Complex64]>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<[Complex64]>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared table of `e(k/d)` for `0 <= k < d`, built once per denominator.
pub fn root_table(d: u64) -> Arc<[Complex64]> {
    if let Some(t) = root_cache().read().expect("root cache poisoned").get(&d) {
        return Arc::clone(t);
    }
    let table: Arc<[Complex64]> = (0..d).map(|k| unit_root(k, d)).collect();
    let mut w = root_cache().write().expect("root cache poisoned");
    Arc::clone(w.entry(d).or_insert(table))
}

/// Neumaier-compensated complex accumulator that also tracks a rounding bound.
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    terms: u64,
    abs_sum: f64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
        self.terms += 1;
        self.abs_sum += z.norm();
    }

    /// Counts a summand that is exactly zero (a unit-group or vanishing term).
    #[inline]
    pub fn skip(&mut self) {
        self.terms += 1;
    }

    pub fn finish(self) -> ExpSumValue {
        let value = Complex64::new(self.re + self.re_c, self.im + self.im_c);
        // Each summand carries a few ulps from the root evaluation and any
        // products formed by the caller; compensated addition adds O(eps) overall.
        let est_error = 4.0 * EPS * self.abs_sum + 2.0 * EPS * value.norm();
        ExpSumValue {
            value,
            terms: self.terms,
            est_error,
        }
    }
}

/// A complete sum together with its number of summands and a rounding estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumValue {
    #[serde(with = "complex_parts", flatten)]
    pub value: Complex64,
    pub terms: u64,
    pub est_error: f64,
}

mod complex_parts {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

impl ExpSumValue {
    pub fn zero(terms: u64) -> Self {
        ExpSumValue {
            value: Complex64::new(0.0, 0.0),
            terms,
            est_error: 0.0,
        }
    }

    pub fn exact(value: Complex64, terms: u64) -> Self {
        ExpSumValue {
            value,
            terms,
            est_error: 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    /// Multiplies by a factor known to relative accuracy of a few ulps.
    pub fn scale(self, factor: Complex64) -> Self {
        let value = self.value * factor;
        ExpSumValue {
            value,
            terms: self.terms,
            est_error: self.est_error * factor.norm() + 4.0 * EPS * value.norm(),
        }
    }

    pub fn mul(self, other: ExpSumValue) -> Self {
        let value = self.value * other.value;
        ExpSumValue {
            value,
            terms: self.terms.saturating_mul(other.terms),
            est_error: self.norm() * other.est_error
                + other.norm() * self.est_error
                + self.est_error * other.est_error
                + 4.0 * EPS * value.norm(),
        }
    }

    pub fn add(self, other: ExpSumValue) -> Self {
        let value = self.value + other.value;
        ExpSumValue {
            value,
            terms: self.terms + other.terms,
            est_error: self.est_error + other.est_error + 2.0 * EPS * value.norm(),
        }
    }

    pub fn neg(self) -> Self {
        ExpSumValue {
            value: -self.value,
            ..self
        }
    }
}

/// Allowed discrepancy for an identity check between two computed sums:
/// `1e-6·√T + 1e-9·(|LHS| + |RHS|)` with `T` the total number of summands.
pub fn identity_tolerance(lhs: &ExpSumValue, rhs: &ExpSumValue) -> f64 {
    let t = (lhs.terms + rhs.terms) as f64;
    1e-6 * t.sqrt() + 1e-9 * (lhs.norm() + rhs.norm())
}

/// Normalized discrepancy; an identity holds when this is at most 1.
pub fn identity_score(lhs: &ExpSumValue, rhs: &ExpSumValue) -> f64 {
    let tol = identity_tolerance(lhs, rhs);
    let dev = (lhs.value - rhs.value).norm();
    if dev == 0.0 {
        0.0
    } else if tol == 0.0 {
        f64::INFINITY
    } else {
        dev / tol
    }
}

pub fn identity_holds(lhs: &ExpSumValue, rhs: &ExpSumValue) -> bool {
    identity_score(lhs, rhs) <= 1.0
}
