//! The weighted Bessel integral
//!
//! `ℑ(n,p,ℓ;cM) = ∫ e((Nℓy + nℓ)/(cpM)) J_{k−1}(4π√(Nnℓ²y)/(cpM)) V(y) dy`
//!
//! together with the scales at which it becomes negligible.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::bessel::{bessel_j, MAX_BESSEL_ORDER};
use super::quadrature::{integrate, QuadratureResult};
use super::window::WindowFunction;
use crate::error::{Error, Result};
use crate::num::{is_prime, RationalAngle};
use crate::report::{CaseOutcome, ScanReport};
use crate::witness;

pub const INTEGRAL_TOLERANCE: f64 = 1e-12;
pub const NEGLIGIBLE: f64 = 1e-15;
pub const TRIVIAL_BOUND_CEILING: f64 = 100.0;
/// Multipliers of the cutoff at and above which the integral must be negligible.
pub const NEGLIGIBLE_FROM: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralParams {
    /// Dyadic length `N`.
    #[serde(rename = "N")]
    pub n_len: f64,
    pub n: u64,
    pub p: u64,
    pub l: u64,
    pub c: u64,
    /// Enters only as a scale; not required to be prime.
    #[serde(rename = "M")]
    pub big_m: u64,
    pub m: u64,
    pub k: u32,
}

impl IntegralParams {
    /// `N = n = 10⁶`, `p = 11`, `ℓ = 3`, `M = 10⁴`, `m = 1`, `k = 43`.
    pub fn toy(c: u64) -> Self {
        IntegralParams {
            n_len: 1e6,
            n: 1_000_000,
            p: 11,
            l: 3,
            c,
            big_m: 10_000,
            m: 1,
            k: 43,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_len > 0.0) || !self.n_len.is_finite() {
            return Err(Error::OutOfRange(format!("N={} must be positive", self.n_len)));
        }
        if self.n == 0 || self.c == 0 || self.big_m == 0 || self.m == 0 {
            return Err(Error::OutOfRange("n, c, M, m must be positive".into()));
        }
        for q in [self.p, self.l] {
            if !is_prime(q) {
                return Err(Error::NotPrime(q));
            }
        }
        if self.k < 7 || self.k % 4 != 3 || self.k - 1 > MAX_BESSEL_ORDER {
            return Err(Error::OutOfRange(format!(
                "weight k={} must satisfy k ≡ 3 mod 4, 7 ≤ k ≤ {}",
                self.k,
                MAX_BESSEL_ORDER + 1
            )));
        }
        Ok(())
    }

    fn denominator(&self) -> f64 {
        self.c as f64 * self.p as f64 * self.big_m as f64
    }

    /// The Bessel argument is `bessel_scale() · √y`.
    pub fn bessel_scale(&self) -> f64 {
        4.0 * PI * self.l as f64 * (self.n_len * self.n as f64).sqrt() / self.denominator()
    }

    /// Cycles per unit `y` of the linear phase.
    pub fn linear_frequency(&self) -> f64 {
        self.n_len * self.l as f64 / self.denominator()
    }

    fn constant_phase(&self) -> Result<Complex64> {
        let q = self.c as u128 * self.p as u128 * self.big_m as u128;
        let q = u64::try_from(q).map_err(|_| Error::OutOfRange("cpM overflows".into()))?;
        let nl = self.n as u128 % q as u128 * (self.l as u128 % q as u128) % q as u128;
        Ok(RationalAngle::new(nl as i128, q)?.unit())
    }
}

/// `ℑ` over the full support of `window` to absolute accuracy `1e−12`.
pub fn integral_i(params: &IntegralParams, window: &WindowFunction) -> Result<QuadratureResult> {
    let support = window.support();
    integral_i_on(params, window, support, INTEGRAL_TOLERANCE)
}

/// `ℑ` restricted to `range ∩ supp V`.
pub fn integral_i_on(
    params: &IntegralParams,
    window: &WindowFunction,
    range: (f64, f64),
    tol: f64,
) -> Result<QuadratureResult> {
    params.validate()?;
    let (s_lo, s_hi) = window.support();
    let (lo, hi) = (range.0.max(s_lo), range.1.min(s_hi));
    let phase0 = params.constant_phase()?;
    let alpha = params.linear_frequency();
    let gamma = params.bessel_scale();
    let order = params.k - 1;
    let cycles = alpha + gamma / (4.0 * PI * lo.max(f64::MIN_POSITIVE).sqrt());
    let max_width = ((hi - lo) / 8.0).min(0.5 / cycles);
    let f = |y: f64| {
        let v = window.eval(y);
        if v == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let j = bessel_j(order, gamma * y.sqrt()).unwrap_or(f64::NAN);
        let turn = (alpha * y).fract();
        phase0 * Complex64::from_polar(j * v, 2.0 * PI * turn)
    };
    integrate(f, lo, hi, max_width, tol)
}

/// Dyadic sizes of the main parameters, as reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicScale {
    #[serde(rename = "M")]
    pub big_m: f64,
    #[serde(rename = "N")]
    pub n_len: f64,
    #[serde(rename = "L")]
    pub l_len: f64,
    #[serde(rename = "P")]
    pub p_len: f64,
    pub m: f64,
    pub eps: f64,
}

impl DyadicScale {
    /// `N = M^{3/2}`, `L = M^{x_L}`, `P = M^{x_P}`.
    pub fn from_exponents(big_m: f64, x_p: f64, x_l: f64, m: f64, eps: f64) -> Self {
        DyadicScale {
            big_m,
            n_len: big_m.powf(1.5),
            l_len: big_m.powf(x_l),
            p_len: big_m.powf(x_p),
            m,
            eps,
        }
    }

    /// `M = 10⁴`, `x_P = 20/77`, `x_L = 9/77`, `m = 1`, `ε = 0.01`.
    pub fn toy() -> Self {
        Self::from_exponents(1e4, 20.0 / 77.0, 9.0 / 77.0, 1.0, 0.01)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CutoffMode {
    /// Modulus cutoff `𝒞 = NLM^ε/(PMm)`.
    Modulus,
    /// Range of the dual variable after Voronoi summation.
    VoronoiR { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Bound(f64),
    Range { lower: f64, upper: f64 },
}

/// `Modulus`: `NLM^ε/(PMm)`. `VoronoiR`: `[M²P/(NLM^ε), M^{2+4θ+ε}P/(NL)]`.
pub fn transition_cutoff(s: &DyadicScale, mode: CutoffMode) -> Cutoff {
    let me = s.big_m.powf(s.eps);
    match mode {
        CutoffMode::Modulus => Cutoff::Bound(s.n_len * s.l_len * me / (s.p_len * s.big_m * s.m)),
        CutoffMode::VoronoiR { theta } => {
            let base = s.big_m * s.big_m * s.p_len / (s.n_len * s.l_len);
            Cutoff::Range {
                lower: base / me,
                upper: base * s.big_m.powf(4.0 * theta) * me,
            }
        }
    }
}

/// Length of the dual sum after Poisson summation at modulus size `C`:
/// `max(N₀, NL/(CPm))·M^ε`.
pub fn poisson_length(s: &DyadicScale, c_len: f64, n0: f64) -> f64 {
    n0.max(s.n_len * s.l_len / (c_len * s.p_len * s.m)) * s.big_m.powf(s.eps)
}

/// `|ℑ|·NL/(cPMm)`, the integral against its trivial bound.
pub fn trivial_bound_ratio(value: f64, c: u64, s: &DyadicScale) -> f64 {
    value * s.n_len * s.l_len / (c as f64 * s.p_len * s.big_m * s.m)
}

/// The modulus used for a cutoff multiplier `t`: `max(1, ⌈t·𝒞⌉)`.
pub fn modulus_for_multiplier(t: f64, s: &DyadicScale) -> u64 {
    let Cutoff::Bound(cut) = transition_cutoff(s, CutoffMode::Modulus) else {
        unreachable!()
    };
    ((t * cut).ceil() as u64).max(1)
}

/// Score of one scan point: trivial-bound ratio over its ceiling, and for
/// `t ≥ 4` also `|ℑ|` over the negligibility threshold.
pub fn decay_case(
    base: &IntegralParams,
    window: &WindowFunction,
    s: &DyadicScale,
    t: f64,
) -> Result<CaseOutcome> {
    let c = modulus_for_multiplier(t, s);
    let params = IntegralParams { c, ..*base };
    let r = integral_i(&params, window)?;
    let size = r.value.norm();
    let ratio = trivial_bound_ratio(size, c, s);
    let mut score = ratio / TRIVIAL_BOUND_CEILING;
    if t >= NEGLIGIBLE_FROM {
        score = score.max(size / NEGLIGIBLE);
    }
    Ok(CaseOutcome {
        witness: witness!("t" => t, "c" => c, "k" => base.k, "abs_integral" => size, "ratio" => ratio),
        score,
        deviation: size,
    })
}

pub fn decay_scan(
    base: &IntegralParams,
    window: &WindowFunction,
    s: &DyadicScale,
    multipliers: &[f64],
) -> Result<ScanReport> {
    let outcomes: Vec<CaseOutcome> = multipliers
        .par_iter()
        .map(|&t| decay_case(base, window, s, t))
        .collect::<Result<_>>()?;
    let mut grid = BTreeMap::new();
    grid.insert("multipliers".into(), json!(multipliers));
    grid.insert("params".into(), json!(base));
    grid.insert("scale".into(), json!(s));
    grid.insert("window".into(), json!(window));
    let sizes: Vec<_> = outcomes.iter().map(|o| o.witness["abs_integral"].clone()).collect();
    let mut report = ScanReport::from_outcomes("bessel-decay", grid, outcomes.into_iter().map(Some));
    if let Cutoff::Bound(cut) = transition_cutoff(s, CutoffMode::Modulus) {
        report.observe("cutoff", cut);
    }
    report.observe("abs_integral", sizes);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_examples() {
        let s = DyadicScale::toy();
        let Cutoff::Bound(c) = transition_cutoff(&s, CutoffMode::Modulus) else { panic!() };
        assert!(c > 0.0);
        let bigger_p = DyadicScale { p_len: s.p_len * 2.0, ..s };
        let Cutoff::Bound(c2) = transition_cutoff(&bigger_p, CutoffMode::Modulus) else { panic!() };
        assert!(c2 < c);
        let double_l = DyadicScale { l_len: s.l_len * 2.0, ..s };
        let Cutoff::Bound(c3) = transition_cutoff(&double_l, CutoffMode::Modulus) else { panic!() };
        assert!((c3 / c - 2.0).abs() < 1e-12);
        let theta = 1.0 / 154.0;
        let Cutoff::Range { lower, upper } =
            transition_cutoff(&s, CutoffMode::VoronoiR { theta })
        else {
            panic!()
        };
        let expect = s.big_m.powf(4.0 * theta + 2.0 * s.eps);
        assert!((upper / lower / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_length_floor() {
        let s = DyadicScale::toy();
        assert!(poisson_length(&s, 1e12, 1.0) >= 1.0);
        assert!(poisson_length(&s, 1e12, 5.0) >= 5.0);
    }

    #[test]
    fn empty_effective_support() {
        let p = IntegralParams::toy(10);
        let r = integral_i_on(&p, &WindowFunction::Bump, (3.0, 5.0), 1e-12).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn high_order_small_argument() {
        // 4π√(Nnℓ²)/(cpM) ≈ 0.086 ≪ 1
        let p = IntegralParams {
            c: 4000,
            ..IntegralParams::toy(1)
        };
        assert!(p.bessel_scale() < 0.1);
        let r = integral_i(&p, &WindowFunction::Bump).unwrap();
        assert!(r.value.norm() <= 1e-20);
    }

    #[test]
    fn validation() {
        let mut p = IntegralParams::toy(3);
        p.k = 41;
        assert!(integral_i(&p, &WindowFunction::Bump).is_err());
        p.k = 43;
        p.p = 12;
        assert!(matches!(p.validate(), Err(Error::NotPrime(12))));
    }
}
