//! Raw-versus-closed identity campaigns.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{grid_of, Evaluation, Lcg, Suite};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::{Error, Result};
use crate::expsums::{
    c1_sum, c2_closed, c2_inner, c2_raw, c3_closed, c3_diagonal, c3_paired, c3_raw,
    offdiagonal_sum_closed, offdiagonal_sum_raw, psi_average_closed, psi_average_raw,
    twisted_split_check, voronoi_char_sum_closed, voronoi_char_sum_raw, PsiAverageParams,
    TwistedSplitParams, VoronoiParams,
};
use crate::num::{divisors, gcd, mod_inv, primes_between, RationalAngle};
use crate::report::ScanReport;
use crate::summation::{identity_score, ExpSumValue};

/// `|𝔠₃(v)| ≤ C3_CEILING · M` for `v ≢ 1`.
pub const C3_CEILING: f64 = 3.0;

fn character(q: u64, index: u64) -> Result<DirichletCharacter> {
    DirichletCharacter::new(q, index)
}

fn identity(lhs: &ExpSumValue, rhs: &ExpSumValue) -> Evaluation {
    Evaluation::new(identity_score(lhs, rhs), (lhs.value - rhs.value).norm())
}

fn worse(a: Evaluation, b: Evaluation) -> Evaluation {
    if b.score > a.score {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiAverageSuite {
    pub p: Vec<u64>,
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
    pub c_max: u64,
    pub r_max: i64,
    pub m_max: i64,
}

impl Default for PsiAverageSuite {
    fn default() -> Self {
        PsiAverageSuite {
            p: vec![3, 5, 7],
            big_m: vec![11, 13],
            c_max: 6,
            r_max: 10,
            m_max: 10,
        }
    }
}

impl Suite for PsiAverageSuite {
    type Case = PsiAverageParams;

    fn name(&self) -> &'static str {
        "psi-average"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<PsiAverageParams>> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &big_m in &self.big_m {
                for c in 1..=self.c_max {
                    for r in 1..=self.r_max {
                        for m in 1..=self.m_max {
                            out.push(PsiAverageParams::new(r, m, c, p, big_m));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &PsiAverageParams) -> Result<Option<Evaluation>> {
        if gcd(case.p, case.c * case.big_m) != 1 {
            return Ok(None);
        }
        let raw = psi_average_raw(case)?;
        let closed = psi_average_closed(case)?;
        Ok(Some(identity(&raw, &closed)))
    }
}

/// Checks `ā·n/b + b̄·n/a ≡ n/(ab)` in `Q/Z` exactly, with `ā` the inverse
/// of `a` modulo `b` and `b̄` the inverse of `b` modulo `a`.
#[derive(Debug, Clone, Serialize)]
pub struct ReciprocitySuite {
    pub trials: u64,
    pub seed: u64,
    pub max_modulus: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReciprocityCase {
    pub a: u64,
    pub b: u64,
    pub n: i64,
}

impl ReciprocitySuite {
    pub fn new(trials: u64, seed: u64) -> Self {
        ReciprocitySuite {
            trials,
            seed,
            max_modulus: 1_000_000,
        }
    }
}

/// Both sides of the reciprocity law.
pub fn reciprocity_sides(a: u64, b: u64, n: i64) -> Result<(RationalAngle, RationalAngle)> {
    let a_inv = mod_inv(a as i64, b)? as i128;
    let b_inv = mod_inv(b as i64, a)? as i128;
    let lhs = RationalAngle::new(a_inv * n as i128, b)?.add(RationalAngle::new(b_inv * n as i128, a)?)?;
    let rhs = RationalAngle::new(n as i128, a * b)?;
    Ok((lhs, rhs))
}

impl Suite for ReciprocitySuite {
    type Case = ReciprocityCase;

    fn name(&self) -> &'static str {
        "reciprocity"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<ReciprocityCase>> {
        let mut g = Lcg::new(self.seed);
        let mut out = Vec::with_capacity(self.trials as usize);
        while (out.len() as u64) < self.trials {
            let a = g.range(1, self.max_modulus);
            let b = g.range(1, self.max_modulus);
            let n = g.range(0, 2 * self.max_modulus) as i64 - self.max_modulus as i64;
            if gcd(a, b) == 1 {
                out.push(ReciprocityCase { a, b, n });
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &ReciprocityCase) -> Result<Option<Evaluation>> {
        let (lhs, rhs) = reciprocity_sides(case.a, case.b, case.n)?;
        let diff = lhs.sub(rhs)?;
        Ok(Some(if diff.is_zero() {
            Evaluation::new(0.0, 0.0)
        } else {
            let gap = diff.num() as f64 / diff.den() as f64;
            Evaluation::new(1.0 + gap, gap)
        }))
    }
}

/// `Σ_a S(ua, unℓ; c) e(−u(a+nℓ)/c) = c` with `u = \overline{pM}`.
#[derive(Debug, Clone, Serialize)]
pub struct C1Suite {
    pub c_max: u64,
    pub per_modulus: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct C1Case {
    pub c: u64,
    pub p: u64,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub n: i64,
    pub l: i64,
}

impl C1Suite {
    pub fn new(per_modulus: u64, seed: u64) -> Self {
        C1Suite {
            c_max: 20,
            per_modulus,
            seed,
        }
    }
}

impl Suite for C1Suite {
    type Case = C1Case;

    fn name(&self) -> &'static str {
        "c1"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<C1Case>> {
        let mut g = Lcg::new(self.seed);
        let small = primes_between(3, 50);
        let large = primes_between(50, 200);
        let mut out = Vec::new();
        for c in 1..=self.c_max {
            for _ in 0..self.per_modulus {
                out.push(C1Case {
                    c,
                    p: g.pick(&small),
                    big_m: g.pick(&large),
                    n: g.range(1, 1000) as i64,
                    l: g.pick(&small) as i64,
                });
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &C1Case) -> Result<Option<Evaluation>> {
        if gcd(case.c, case.p * case.big_m) != 1 {
            return Ok(None);
        }
        let v = c1_sum(case.c, case.p, case.big_m, case.n, case.l)?;
        let expect = ExpSumValue::exact(Complex64::new(case.c as f64, 0.0), 0);
        Ok(Some(identity(&v, &expect)))
    }
}

/// Factor of the off-diagonal character sum modulo `M`.
#[derive(Debug, Clone, Serialize)]
pub struct C2Suite {
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
    pub p: Vec<u64>,
    pub c: Vec<u64>,
    pub n: Vec<i64>,
    pub l: Vec<i64>,
    /// Moduli `M` for which the full sum modulo `cM` is also enumerated.
    pub full_modulus_m: Vec<u64>,
    pub full_modulus_c: Vec<u64>,
}

impl Default for C2Suite {
    fn default() -> Self {
        C2Suite {
            big_m: vec![5, 7, 11, 13],
            p: vec![3, 17],
            c: vec![1, 2, 4],
            n: vec![1, 2],
            l: vec![2, 3],
            full_modulus_m: vec![5, 7],
            full_modulus_c: vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum C2Case {
    Factor {
        #[serde(rename = "M")]
        big_m: u64,
        chi: u64,
        p: u64,
        c: u64,
        n: i64,
        l: i64,
    },
    Inner {
        #[serde(rename = "M")]
        big_m: u64,
        chi: u64,
        p: u64,
        c: u64,
        b: i64,
    },
    FullModulus {
        #[serde(rename = "M")]
        big_m: u64,
        chi: u64,
        p: u64,
        c: u64,
        n: i64,
        l: i64,
    },
}

impl Suite for C2Suite {
    type Case = C2Case;

    fn name(&self) -> &'static str {
        "c2"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<C2Case>> {
        let mut out = Vec::new();
        for &big_m in &self.big_m {
            for chi in 0..big_m - 1 {
                for &p in &self.p {
                    for &c in &self.c {
                        for &n in &self.n {
                            for &l in &self.l {
                                out.push(C2Case::Factor { big_m, chi, p, c, n, l });
                            }
                        }
                        for b in 0..big_m as i64 {
                            out.push(C2Case::Inner { big_m, chi, p, c, b });
                        }
                    }
                }
            }
        }
        for &big_m in &self.full_modulus_m {
            for chi in 1..big_m - 1 {
                for &c in &self.full_modulus_c {
                    out.push(C2Case::FullModulus { big_m, chi, p: self.p[0], c, n: 2, l: 3 });
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &C2Case) -> Result<Option<Evaluation>> {
        match *case {
            C2Case::Factor { big_m, chi, p, c, n, l } => {
                let chi = character(big_m, chi)?;
                if chi.is_principal() || gcd(p * c, big_m) != 1 {
                    return Ok(None);
                }
                Ok(Some(identity(&c2_raw(&chi, p, c, n, l)?, &c2_closed(&chi, p, c, n, l)?)))
            }
            C2Case::Inner { big_m, chi, p, c, b } => {
                let chi = character(big_m, chi)?;
                if chi.is_principal() || gcd(p * c, big_m) != 1 {
                    return Ok(None);
                }
                let inner = c2_inner(&chi, p, c, b)?;
                let pc = (p % big_m * (c % big_m)) as i64;
                let expect = if b.rem_euclid(big_m as i64) == 1 {
                    Complex64::new(0.0, 0.0)
                } else {
                    chi.eval(pc) * chi.conj().eval(b - 1) * gauss_sum(&chi)?.value
                };
                Ok(Some(identity(&inner, &ExpSumValue::exact(expect, big_m))))
            }
            C2Case::FullModulus { big_m, chi, p, c, n, l } => {
                let chi = character(big_m, chi)?;
                if chi.is_principal() || gcd(p * c, big_m) != 1 || gcd(p, c) != 1 {
                    return Ok(None);
                }
                let raw = offdiagonal_sum_raw(&chi, p, c, n, l)?;
                let closed = offdiagonal_sum_closed(&chi, p, c, n, l)?;
                Ok(Some(identity(&raw, &closed)))
            }
        }
    }
}

/// `𝔠₃(v)` by three routes, its diagonal value and its off-diagonal size.
#[derive(Debug, Clone, Serialize)]
pub struct C3Suite {
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
}

impl Default for C3Suite {
    fn default() -> Self {
        C3Suite {
            big_m: vec![5, 7, 11, 13],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct C3Case {
    #[serde(rename = "M")]
    pub big_m: u64,
    pub chi: u64,
    pub v: i64,
}

impl Suite for C3Suite {
    type Case = C3Case;

    fn name(&self) -> &'static str {
        "c3"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<C3Case>> {
        let mut out = Vec::new();
        for &big_m in &self.big_m {
            for chi in 1..big_m - 1 {
                for v in 1..big_m as i64 {
                    out.push(C3Case { big_m, chi, v });
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &C3Case) -> Result<Option<Evaluation>> {
        let chi = character(case.big_m, case.chi)?;
        let raw = c3_raw(case.v, &chi)?;
        let paired = c3_paired(case.v, &chi)?;
        let closed = c3_closed(case.v, &chi)?;
        let mut ev = worse(identity(&raw, &closed), identity(&paired, &closed));
        let size = closed.norm() / case.big_m as f64;
        if case.v == 1 {
            let exact = closed.value.re.round() as i64 == c3_diagonal(case.big_m);
            if !exact {
                ev = worse(ev, Evaluation::new(2.0, (closed.value.re - c3_diagonal(case.big_m) as f64).abs()));
            }
        } else {
            ev = worse(ev, Evaluation::new(size / C3_CEILING, size));
        }
        Ok(Some(ev.with("ratio_to_M", size)))
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        let cases = self.cases().expect("grid");
        let max = cases
            .iter()
            .zip(evals)
            .filter(|(c, _)| c.v != 1)
            .filter_map(|(_, e)| e.as_ref()?.extra.get("ratio_to_M")?.as_f64())
            .fold(0.0, f64::max);
        report.observe("max_off_diagonal_ratio_to_M", max);
    }
}

/// `S_ψ(np²M, rℓ; cpM)` against its two reductions.
#[derive(Debug, Clone, Serialize)]
pub struct TwistedSplitSuite {
    pub p: Vec<u64>,
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
    pub c_max: u64,
    pub n: Vec<i64>,
    pub r: Vec<i64>,
    pub l: Vec<i64>,
}

impl Default for TwistedSplitSuite {
    fn default() -> Self {
        TwistedSplitSuite {
            p: vec![3, 5],
            big_m: vec![7, 11],
            c_max: 8,
            n: vec![1, 2, 3],
            r: vec![1, 2],
            l: vec![2, 3, 5],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwistedSplitCase {
    pub p: u64,
    pub psi: u64,
    #[serde(flatten)]
    pub params: TwistedSplitParams,
}

impl Suite for TwistedSplitSuite {
    type Case = TwistedSplitCase;

    fn name(&self) -> &'static str {
        "twisted-split"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<TwistedSplitCase>> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &big_m in &self.big_m {
                for c in 1..=self.c_max {
                    for psi in 0..p - 1 {
                        for &n in &self.n {
                            for &r in &self.r {
                                for &l in &self.l {
                                    let params = TwistedSplitParams { n, big_m, r, l, c };
                                    out.push(TwistedSplitCase { p, psi, params });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &TwistedSplitCase) -> Result<Option<Evaluation>> {
        if case.params.l as u64 == case.params.big_m {
            return Ok(None);
        }
        let psi = character(case.p, case.psi)?;
        let s = twisted_split_check(&case.params, &psi)?;
        let mut ev = identity(&s.lhs, &s.rhs1);
        if let Some(rhs2) = &s.rhs2 {
            ev = worse(ev, identity(&s.rhs1, rhs2));
        }
        Ok(Some(ev.with("second_reduction", s.rhs2.is_some())))
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        let with_second = evals
            .iter()
            .flatten()
            .filter(|e| e.extra.get("second_reduction") == Some(&json!(true)))
            .count();
        report.observe("cases_with_second_reduction", with_second);
    }
}

/// The restricted β-sum against its Ramanujan-sum evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct VoronoiCharSuite {
    pub m_max: u64,
    pub c_max: u64,
    pub r_max: u64,
    pub l: Vec<u64>,
    pub n_max: i64,
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
}

impl Default for VoronoiCharSuite {
    fn default() -> Self {
        VoronoiCharSuite {
            m_max: 6,
            c_max: 12,
            r_max: 10,
            l: vec![2, 3, 5, 7],
            n_max: 10,
            big_m: vec![7, 11],
        }
    }
}

impl Suite for VoronoiCharSuite {
    type Case = VoronoiParams;

    fn name(&self) -> &'static str {
        "voronoi-char"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<VoronoiParams>> {
        let mut out = Vec::new();
        for &big_m in &self.big_m {
            for m in 1..=self.m_max {
                for c in 1..=self.c_max {
                    for d in divisors(c)? {
                        for m_prime in divisors(m * c)? {
                            for r in 1..=self.r_max {
                                for &l in &self.l {
                                    for n in 0..=self.n_max {
                                        out.push(VoronoiParams { n, m, m_prime, c, d, r, l, big_m });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &VoronoiParams) -> Result<Option<Evaluation>> {
        let closed = match voronoi_char_sum_closed(case) {
            Ok(v) => v,
            Err(Error::ParameterInconsistency(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let raw = voronoi_char_sum_raw(case)?;
        let s = case.split()?;
        let stratum = if case.r % s.c1 != 0 {
            "c1-does-not-divide-r"
        } else if case.n.rem_euclid(s.q2 as i64) != 0 {
            "q2-does-not-divide-n"
        } else if closed.value == Complex64::new(0.0, 0.0) {
            "other-zero"
        } else {
            "nonzero"
        };
        Ok(Some(identity(&raw, &closed).with("stratum", stratum)))
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for e in evals.iter().flatten() {
            if let Some(Value::String(s)) = e.extra.get("stratum") {
                *counts.entry(s.clone()).or_default() += 1;
            }
        }
        report.observe("strata", json!(counts));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocity_examples() {
        let (l, r) = reciprocity_sides(3, 5, 1).unwrap();
        assert_eq!(l, r);
        assert_eq!(r.to_string(), "1/15");
        // orientation: ā/b ≡ −b̄/a + 1/(ab)
        let two_fifths = RationalAngle::new(2, 5).unwrap();
        let other = RationalAngle::new(-2, 3).unwrap().add(RationalAngle::new(1, 15).unwrap()).unwrap();
        assert_eq!(two_fifths, other);
        let (l, r) = reciprocity_sides(1, 7, 3).unwrap();
        assert_eq!((l, r), (RationalAngle::new(3, 7).unwrap(), RationalAngle::new(3, 7).unwrap()));
    }
}
