//! Size bounds and the exponent optimum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{grid_of, Evaluation, Lcg, Suite};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::exponent::{
    minimize_max, paper_bound_problem, rat, staged_elimination, POST_HOC_CONSTRAINT,
};
use crate::expsums::{c4_correlation, d_sum_all, kloosterman, C4Params};
use crate::num::{divisor_count, gcd, gcd_i, primes_between};
use crate::oscillatory::{
    bessel_j, decay_case, integral_i, modulus_for_multiplier, DyadicScale, IntegralParams,
    WindowFunction,
};
use crate::report::ScanReport;

/// `|𝔠₄|` over its square-root scale must stay below this.
pub const C4_RATIO_CEILING: f64 = 10.0;
/// `max_{u≠0} |𝔇(u; M)| ≤ DSUM_CEILING·√M`.
pub const DSUM_CEILING: f64 = 4.0;
const RECURRENCE_TOLERANCE: f64 = 1e-9;

fn max_extra(evals: &[Option<Evaluation>], key: &str) -> f64 {
    evals
        .iter()
        .flatten()
        .filter_map(|e| e.extra.get(key)?.as_f64())
        .fold(0.0, f64::max)
}

/// `|S(m,n;c)| ≤ d(c)·gcd(m,n,c)^{1/2}·c^{1/2}`.
#[derive(Debug, Clone, Serialize)]
pub struct WeilSuite {
    pub c_max: u64,
    pub per_modulus: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeilCase {
    pub m: i64,
    pub n: i64,
    pub c: u64,
}

impl WeilSuite {
    pub fn new(c_max: u64, per_modulus: u64, seed: u64) -> Self {
        WeilSuite {
            c_max,
            per_modulus,
            seed,
        }
    }
}

impl Suite for WeilSuite {
    type Case = WeilCase;

    fn name(&self) -> &'static str {
        "weil"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<WeilCase>> {
        let mut g = Lcg::new(self.seed);
        let mut out = Vec::new();
        for c in 1..=self.c_max {
            for _ in 0..self.per_modulus {
                let m = g.below(c) as i64;
                let n = g.below(c) as i64;
                out.push(WeilCase { m, n, c });
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &WeilCase) -> Result<Option<Evaluation>> {
        let s = kloosterman(case.m, case.n, case.c)?;
        let common = gcd(gcd_i(case.m, case.c), gcd_i(case.n, case.c));
        let bound = divisor_count(case.c)? as f64 * (common as f64).sqrt() * (case.c as f64).sqrt();
        let ratio = s.norm() / (bound + s.est_error);
        Ok(Some(Evaluation::new(ratio, s.norm())))
    }
}

/// Seeded random instances of the four-modulus correlation sum.
#[derive(Debug, Clone, Serialize)]
pub struct C4Suite {
    pub instances: u64,
    pub seed: u64,
    pub r_prime_max: u64,
    pub l: Vec<u64>,
}

impl C4Suite {
    pub fn new(instances: u64, seed: u64) -> Self {
        C4Suite {
            instances,
            seed,
            r_prime_max: 12,
            l: vec![5, 7, 11, 13],
        }
    }
}

impl Suite for C4Suite {
    type Case = C4Params;

    fn name(&self) -> &'static str {
        "c4"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<C4Params>> {
        let mut g = Lcg::new(self.seed);
        let p_choices = primes_between(17, 48);
        let q1_choices = [1u64, 3, 7, 11, 13, 17, 19];
        let q2_choices = [1u64, 2, 3, 5, 6];
        let m_choices = [101u64, 103, 107, 109];
        let mut out = Vec::new();
        let mut attempts = 0u64;
        while (out.len() as u64) < self.instances {
            attempts += 1;
            if attempts > 1000 * self.instances.max(1) {
                return Err(Error::ParameterInconsistency("cannot draw admissible instances".into()));
            }
            let l = g.pick(&self.l);
            let l_prime = g.pick(&self.l);
            let r_prime = g.range(1, self.r_prime_max);
            let p = g.pick(&p_choices);
            let p_prime = g.pick(&p_choices);
            let q1 = g.pick(&q1_choices);
            let q2_radical = g.pick(&q2_choices);
            let c2 = g.range(1, 200) as i64;
            let m2 = g.range(1, 30) as i64;
            let big_m = g.pick(&m_choices);
            let h = g.range(1, 60) as i64;
            let modulus = r_prime * l * l_prime;
            let n = g.below(modulus) as i64;
            if l == l_prime {
                continue;
            }
            let params = C4Params {
                c2,
                q2_radical,
                p,
                p_prime,
                q1,
                m2,
                big_m,
                h,
                n,
                r_prime,
                l,
                l_prime,
            };
            if params.factors().is_ok() {
                out.push(params);
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &C4Params) -> Result<Option<Evaluation>> {
        let v = c4_correlation(case)?;
        let ratio = v.norm() / case.square_root_scale()?;
        Ok(Some(Evaluation::new(ratio / C4_RATIO_CEILING, v.norm()).with("ratio", ratio)))
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        report.observe("max_ratio", max_extra(evals, "ratio"));
    }
}

/// `max_{u≢0} |𝔇(u; M)| ≤ 4√M` for every non-principal `χ`.
#[derive(Debug, Clone, Serialize)]
pub struct DsumCancelSuite {
    #[serde(rename = "M_max")]
    pub m_max: u64,
}

impl DsumCancelSuite {
    pub fn new(m_max: u64) -> Self {
        DsumCancelSuite { m_max }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DsumCase {
    #[serde(rename = "M")]
    pub big_m: u64,
    pub chi: u64,
}

impl Suite for DsumCancelSuite {
    type Case = DsumCase;

    fn name(&self) -> &'static str {
        "dsum-cancel"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<DsumCase>> {
        Ok(primes_between(3, self.m_max + 1)
            .into_iter()
            .flat_map(|big_m| (1..big_m - 1).map(move |chi| DsumCase { big_m, chi }))
            .collect())
    }

    fn eval(&self, case: &DsumCase) -> Result<Option<Evaluation>> {
        let chi = DirichletCharacter::new(case.big_m, case.chi)?;
        let all = d_sum_all(&chi)?;
        let max = all[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let ratio = max / (case.big_m as f64).sqrt();
        Ok(Some(Evaluation::new(ratio / DSUM_CEILING, max).with("ratio_to_sqrt_M", ratio)))
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        report.observe("max_ratio_to_sqrt_M", max_extra(evals, "ratio_to_sqrt_M"));
    }
}

/// Toy-scale decay of the Bessel integral, plus recurrence residuals of `J_ν`.
#[derive(Debug, Clone, Serialize)]
pub struct BesselDecaySuite {
    pub multipliers: Vec<f64>,
    pub params: IntegralParams,
    pub scale: DyadicScale,
    pub window: WindowFunction,
    pub low_order_weight: u32,
    pub recurrence_max_order: u32,
    pub recurrence_points: u32,
    pub recurrence_x_range: (f64, f64),
}

impl Default for BesselDecaySuite {
    fn default() -> Self {
        let theta = 1.0 / 154.0;
        BesselDecaySuite {
            multipliers: vec![1.0 / 16.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            params: IntegralParams::toy(1),
            scale: DyadicScale::toy(),
            window: WindowFunction::Plateau { theta, big_m: 1e4 },
            low_order_weight: 11,
            recurrence_max_order: 60,
            recurrence_points: 100,
            recurrence_x_range: (0.1, 200.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum BesselCase {
    /// `|ℑ|` against the trivial bound, and negligibility for `t ≥ 4`.
    Decay { t: f64 },
    /// `|ℑ|` does not grow when the weight rises to the toy weight.
    OrderMonotone { t: f64, k_low: u32 },
    /// `J_{ν−1} + J_{ν+1} = (2ν/x) J_ν` and `|J_ν| ≤ 1`.
    Recurrence { nu: u32, x: f64 },
}

impl Suite for BesselDecaySuite {
    type Case = BesselCase;

    fn name(&self) -> &'static str {
        "bessel-decay"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        grid_of(self)
    }

    fn cases(&self) -> Result<Vec<BesselCase>> {
        let mut out: Vec<BesselCase> = self.multipliers.iter().map(|&t| BesselCase::Decay { t }).collect();
        for &t in self.multipliers.iter().filter(|&&t| t >= crate::oscillatory::NEGLIGIBLE_FROM) {
            out.push(BesselCase::OrderMonotone {
                t,
                k_low: self.low_order_weight,
            });
        }
        let (lo, hi) = self.recurrence_x_range;
        let steps = self.recurrence_points.max(2) - 1;
        for nu in 1..=self.recurrence_max_order {
            for i in 0..=steps {
                let x = lo * (hi / lo).powf(i as f64 / steps as f64);
                out.push(BesselCase::Recurrence { nu, x });
            }
        }
        Ok(out)
    }

    fn eval(&self, case: &BesselCase) -> Result<Option<Evaluation>> {
        match *case {
            BesselCase::Decay { t } => {
                let o = decay_case(&self.params, &self.window, &self.scale, t)?;
                Ok(Some(Evaluation {
                    score: o.score,
                    deviation: o.deviation,
                    extra: o.witness.into_iter().filter(|(k, _)| k != "t").collect(),
                }))
            }
            BesselCase::OrderMonotone { t, k_low } => {
                let c = modulus_for_multiplier(t, &self.scale);
                let high = IntegralParams { c, ..self.params };
                let low = IntegralParams { k: k_low, ..high };
                let a = integral_i(&high, &self.window)?;
                let b = integral_i(&low, &self.window)?;
                let (ha, hb) = (a.value.norm(), b.value.norm());
                let ok = ha <= hb + a.est_error + b.est_error;
                Ok(Some(
                    Evaluation::new(if ok { 0.0 } else { 2.0 }, (ha - hb).max(0.0))
                        .with("abs_integral_high", ha)
                        .with("abs_integral_low", hb),
                ))
            }
            BesselCase::Recurrence { nu, x } => {
                let below = bessel_j(nu - 1, x)?;
                let mid = bessel_j(nu, x)?;
                let above = bessel_j(nu + 1, x)?;
                let residual = (below + above - 2.0 * nu as f64 / x * mid).abs();
                let score = residual / (RECURRENCE_TOLERANCE * mid.abs().max(1.0));
                let bounded = [below, mid, above].iter().all(|v| v.abs() <= 1.0);
                Ok(Some(Evaluation::new(if bounded { score } else { score.max(2.0) }, residual)))
            }
        }
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        let decay: Vec<Value> = self
            .multipliers
            .iter()
            .zip(evals)
            .filter_map(|(t, e)| {
                let e = e.as_ref()?;
                Some(json!({"t": t, "c": e.extra.get("c"), "abs_integral": e.extra.get("abs_integral"), "ratio": e.extra.get("ratio")}))
            })
            .collect();
        report.observe("decay", decay);
        let residual = evals
            .iter()
            .skip(self.multipliers.len())
            .flatten()
            .map(|e| e.deviation)
            .fold(0.0, f64::max);
        report.observe("max_recurrence_residual", residual);
    }
}

/// The built-in exponent problem by LP and by staged elimination.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentSuite;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentCase {
    pub problem: String,
}

impl Suite for ExponentSuite {
    type Case = ExponentCase;

    fn name(&self) -> &'static str {
        "exponent"
    }

    fn grid(&self) -> BTreeMap<String, Value> {
        BTreeMap::from([("problem".to_string(), json!("builtin"))])
    }

    fn cases(&self) -> Result<Vec<ExponentCase>> {
        Ok(vec![ExponentCase {
            problem: "builtin".into(),
        }])
    }

    fn eval(&self, case: &ExponentCase) -> Result<Option<Evaluation>> {
        if case.problem != "builtin" {
            return Err(Error::OutOfRange(format!("unknown problem '{}'", case.problem)));
        }
        let prob = paper_bound_problem();
        let lp = minimize_max(&prob)?;
        let staged = staged_elimination(&prob)?;
        let relaxed = minimize_max(&prob.without_constraint(POST_HOC_CONSTRAINT))?;
        let post_hoc = prob.constraints[POST_HOC_CONSTRAINT].holds(&relaxed.point);
        let checks = [
            lp.value == rat(115, 154),
            lp.point.theta == rat(1, 154),
            staged.result.point == lp.point && staged.result.value == lp.value,
            lp.certificate.lower_bound(&prob).as_ref() == Some(&lp.value),
            lp.strict_satisfied,
            post_hoc,
        ];
        let failed = checks.iter().filter(|c| !**c).count();
        let gap = num_traits::Signed::abs(&(&lp.value - rat(115, 154)));
        Ok(Some(
            Evaluation::new(if failed == 0 { 0.0 } else { 2.0 }, num_traits::ToPrimitive::to_f64(&gap).unwrap_or(f64::NAN))
                .with("theta", lp.point.theta.to_string())
                .with("exponent", lp.value.to_string())
                .with("x_p", lp.point.x_p.to_string())
                .with("x_l", lp.point.x_l.to_string())
                .with("active_terms", &lp.active_terms)
                .with("staged_plan", staged.trace.clone())
                .with("relaxed_exponent", relaxed.value.to_string())
                .with("relaxed_satisfies_post_hoc", post_hoc)
                .with("failed_checks", failed),
        ))
    }

    fn observe(&self, report: &mut ScanReport, evals: &[Option<Evaluation>]) {
        if let Some(Some(e)) = evals.first() {
            for (k, v) in &e.extra {
                report.observe(k, v.clone());
            }
        }
    }
}
