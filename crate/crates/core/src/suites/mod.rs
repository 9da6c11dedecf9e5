//! Named verification campaigns. Each suite enumerates a deterministic grid,
//! scores every case (`≤ 1` passes), and reduces the scores in grid order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::report::{CaseOutcome, ScanReport, Witness};

mod bounds;
mod identities;

pub use bounds::{
    BesselDecaySuite, C4Suite, DsumCancelSuite, ExponentSuite, WeilSuite, C4_RATIO_CEILING,
    DSUM_CEILING,
};
pub use identities::{
    C1Suite, C2Suite, C3Suite, PsiAverageSuite, ReciprocitySuite, TwistedSplitSuite,
    VoronoiCharSuite, C3_CEILING,
};

/// 64-bit linear congruential generator with Knuth's MMIX constants.
/// Outputs are the high 32 bits of the state after each step.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform-ish in `0..n` by multiply-shift; `n ≤ 2³²`.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0 && n <= 1 << 32);
        (self.next_u32() as u64 * n) >> 32
    }

    /// In `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    pub fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.below(items.len() as u64) as usize].clone()
    }
}

/// Result of scoring one case.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub score: f64,
    pub deviation: f64,
    pub extra: Witness,
}

impl Evaluation {
    pub fn new(score: f64, deviation: f64) -> Self {
        Evaluation {
            score,
            deviation,
            extra: Witness::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }
}

pub trait Suite: Sync {
    type Case: Serialize + DeserializeOwned + Send + Sync;

    fn name(&self) -> &'static str;

    fn grid(&self) -> BTreeMap<String, Value>;

    fn cases(&self) -> Result<Vec<Self::Case>>;

    /// `None` marks a grid point excluded by a precondition.
    fn eval(&self, case: &Self::Case) -> Result<Option<Evaluation>>;

    fn observe(&self, _report: &mut ScanReport, _evals: &[Option<Evaluation>]) {}
}

pub(crate) fn grid_of<T: Serialize>(value: &T) -> BTreeMap<String, Value> {
    match serde_json::to_value(value).expect("grid serializes") {
        Value::Object(map) => map.into_iter().collect(),
        other => BTreeMap::from([("value".to_string(), other)]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Upper bound on the number of grid points.
    pub budget: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            budget: None,
        }
    }
}

pub fn execute<S: Suite>(suite: &S, opts: &RunOptions) -> Result<ScanReport> {
    let start = Instant::now();
    let cases = suite.cases()?;
    if let Some(budget) = opts.budget {
        if cases.len() as u64 > budget {
            return Err(Error::BudgetExceeded {
                needed: cases.len() as u64,
                budget,
            });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::OutOfRange(format!("worker pool: {e}")))?;
    let evals: Vec<Option<Evaluation>> =
        pool.install(|| cases.par_iter().map(|c| suite.eval(c)).collect::<Result<_>>())?;
    let outcomes = cases.iter().zip(&evals).map(|(case, ev)| {
        ev.as_ref().map(|ev| {
            let mut witness = crate::report::Witness::new();
            if let Value::Object(map) = serde_json::to_value(case).expect("case serializes") {
                witness.extend(map);
            }
            witness.extend(ev.extra.clone());
            CaseOutcome {
                witness,
                score: ev.score,
                deviation: ev.deviation,
            }
        })
    });
    let mut report = ScanReport::from_outcomes(suite.name(), suite.grid(), outcomes);
    suite.observe(&mut report, &evals);
    report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

/// Recomputes the score of a stored witness.
pub fn replay<S: Suite>(suite: &S, witness: &Witness) -> Result<Option<f64>> {
    let value = Value::Object(witness.clone().into_iter().collect());
    let case: S::Case = serde_json::from_value(value)
        .map_err(|e| Error::ParameterInconsistency(format!("witness does not describe a case: {e}")))?;
    Ok(suite.eval(&case)?.map(|e| e.score))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuiteName {
    PsiAverage,
    Reciprocity,
    C1,
    C2,
    C3,
    C4,
    VoronoiChar,
    TwistedSplit,
    Weil,
    DsumCancel,
    BesselDecay,
    Exponent,
}

impl SuiteName {
    pub const ALL: [SuiteName; 12] = [
        SuiteName::PsiAverage,
        SuiteName::Reciprocity,
        SuiteName::C1,
        SuiteName::C2,
        SuiteName::C3,
        SuiteName::C4,
        SuiteName::VoronoiChar,
        SuiteName::TwistedSplit,
        SuiteName::Weil,
        SuiteName::DsumCancel,
        SuiteName::BesselDecay,
        SuiteName::Exponent,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::PsiAverage => "psi-average",
            SuiteName::Reciprocity => "reciprocity",
            SuiteName::C1 => "c1",
            SuiteName::C2 => "c2",
            SuiteName::C3 => "c3",
            SuiteName::C4 => "c4",
            SuiteName::VoronoiChar => "voronoi-char",
            SuiteName::TwistedSplit => "twisted-split",
            SuiteName::Weil => "weil",
            SuiteName::DsumCancel => "dsum-cancel",
            SuiteName::BesselDecay => "bessel-decay",
            SuiteName::Exponent => "exponent",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown suite '{s}'")))
    }
}

/// Settings shared by every default grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSettings {
    pub seed: u64,
    /// Overrides the number of random trials where a suite draws them.
    pub trials: Option<u64>,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings { seed: 1, trials: None }
    }
}

macro_rules! dispatch {
    ($name:expr, $settings:expr, |$s:ident| $body:expr) => {{
        let st = $settings;
        match $name {
            SuiteName::PsiAverage => { let $s = PsiAverageSuite::default(); $body }
            SuiteName::Reciprocity => { let $s = ReciprocitySuite::new(st.trials.unwrap_or(10_000), st.seed); $body }
            SuiteName::C1 => { let $s = C1Suite::new(st.trials.unwrap_or(5), st.seed); $body }
            SuiteName::C2 => { let $s = C2Suite::default(); $body }
            SuiteName::C3 => { let $s = C3Suite::default(); $body }
            SuiteName::C4 => { let $s = C4Suite::new(st.trials.unwrap_or(200), st.seed); $body }
            SuiteName::VoronoiChar => { let $s = VoronoiCharSuite::default(); $body }
            SuiteName::TwistedSplit => { let $s = TwistedSplitSuite::default(); $body }
            SuiteName::Weil => { let $s = WeilSuite::new(2000, st.trials.unwrap_or(20), st.seed); $body }
            SuiteName::DsumCancel => { let $s = DsumCancelSuite::new(300); $body }
            SuiteName::BesselDecay => { let $s = BesselDecaySuite::default(); $body }
            SuiteName::Exponent => { let $s = ExponentSuite; $body }
        }
    }};
}

/// Runs a suite on its default grid.
pub fn run_suite(name: SuiteName, settings: &SuiteSettings, opts: &RunOptions) -> Result<ScanReport> {
    dispatch!(name, settings, |s| execute(&s, opts))
}

/// Re-evaluates the worst witness of a default-grid report.
pub fn replay_witness(name: SuiteName, settings: &SuiteSettings, witness: &Witness) -> Result<Option<f64>> {
    dispatch!(name, settings, |s| replay(&s, witness))
}
