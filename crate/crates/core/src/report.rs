//! Machine-readable records of parameter sweeps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type Witness = BTreeMap<String, Value>;

/// One evaluated grid point. `score ≤ 1` passes; `deviation` is the raw
/// quantity the score normalizes.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub witness: Witness,
    pub score: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub suite: String,
    pub grid: BTreeMap<String, Value>,
    pub cases: u64,
    pub skipped: u64,
    /// Largest normalized deviation; a case passes at `≤ tolerance`.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub worst_witness: Witness,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observations: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

pub const CSV_HEADER: &str =
    "suite,cases,skipped,max_deviation,tolerance,passed,runtime_ms,worst_witness";

impl ScanReport {
    /// Reduces outcomes in the order given. Ties keep the earliest witness;
    /// a NaN score fails the scan.
    pub fn from_outcomes<I>(suite: &str, grid: BTreeMap<String, Value>, outcomes: I) -> Self
    where
        I: IntoIterator<Item = Option<CaseOutcome>>,
    {
        let mut cases = 0;
        let mut skipped = 0;
        let mut worst: Option<CaseOutcome> = None;
        for o in outcomes {
            let Some(o) = o else {
                skipped += 1;
                continue;
            };
            cases += 1;
            let score = if o.score.is_nan() { f64::INFINITY } else { o.score };
            if worst.as_ref().map_or(true, |w| score > w.score) {
                worst = Some(CaseOutcome { score, ..o });
            }
        }
        let (max_deviation, worst_witness) = match worst {
            Some(w) => (w.score, w.witness),
            None => (0.0, Witness::new()),
        };
        ScanReport {
            suite: suite.to_string(),
            grid,
            cases,
            skipped,
            max_deviation,
            tolerance: 1.0,
            worst_witness,
            passed: max_deviation <= 1.0,
            observations: BTreeMap::new(),
            runtime_ms: None,
        }
    }

    pub fn observe(&mut self, key: &str, value: impl Into<Value>) {
        self.observations.insert(key.to_string(), value.into());
    }

    /// Forces failure; used for suite-level checks outside the case grid.
    pub fn fail(&mut self, reason: &str) {
        self.passed = false;
        let reasons = self
            .observations
            .entry("failures".to_string())
            .or_insert_with(|| Value::Array(Vec::new()));
        if let Value::Array(v) = reasons {
            v.push(Value::String(reason.to_string()));
        }
    }

    /// JSON without `runtime_ms`; byte-identical across reruns with the same inputs.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.runtime_ms = None;
        serde_json::to_string(&copy).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn csv_row(&self) -> String {
        let witness = serde_json::to_string(&self.worst_witness).expect("witness serializes");
        format!(
            "{},{},{},{},{},{},{},\"{}\"",
            self.suite,
            self.cases,
            self.skipped,
            self.max_deviation,
            self.tolerance,
            self.passed,
            self.runtime_ms.map(|r| r.to_string()).unwrap_or_default(),
            witness.replace('"', "\"\"")
        )
    }
}

#[macro_export]
macro_rules! witness {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut w = $crate::report::Witness::new();
        $( w.insert($k.to_string(), serde_json::json!($v)); )*
        w
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(x: i64, score: f64) -> Option<CaseOutcome> {
        Some(CaseOutcome {
            witness: crate::witness!("x" => x),
            score,
            deviation: score,
        })
    }

    #[test]
    fn reduction_keeps_first_worst() {
        let r = ScanReport::from_outcomes(
            "t",
            BTreeMap::new(),
            vec![outcome(1, 0.5), None, outcome(2, 0.9), outcome(3, 0.9)],
        );
        assert_eq!((r.cases, r.skipped), (3, 1));
        assert_eq!(r.max_deviation, 0.9);
        assert_eq!(r.worst_witness["x"], 2);
        assert!(r.passed);
    }

    #[test]
    fn nan_fails() {
        let r = ScanReport::from_outcomes("t", BTreeMap::new(), vec![outcome(1, f64::NAN)]);
        assert!(!r.passed);
    }

    #[test]
    fn canonical_json_drops_runtime() {
        let mut r = ScanReport::from_outcomes("t", BTreeMap::new(), vec![outcome(1, 0.25)]);
        r.runtime_ms = Some(12);
        assert!(r.to_json().contains("runtime_ms"));
        assert!(!r.canonical_json().contains("runtime_ms"));
        let back: ScanReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.csv_row().ends_with("\"{\"\"x\"\":1}\""));
    }
}
