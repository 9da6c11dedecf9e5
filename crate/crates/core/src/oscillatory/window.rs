//! Smooth compactly supported weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowFunction {
    /// `exp(1 − 1/(1 − t²))`, `t = 2y − 3`: supported on `[1, 2]`, peak 1 at `y = 3/2`.
    Bump,
    /// Supported on `[a, 4]`, equal to 1 on `[2a, 2]`, with `a = M^{−4θ}`.
    Plateau {
        theta: f64,
        #[serde(rename = "M")]
        big_m: f64,
    },
}

fn flat(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth step: 0 for `s ≤ 0`, 1 for `s ≥ 1`.
fn step(s: f64) -> f64 {
    let (a, b) = (flat(s), flat(1.0 - s));
    a / (a + b)
}

impl WindowFunction {
    pub fn plateau(theta: f64, big_m: f64) -> Result<Self> {
        if !(theta >= 0.0) || !(big_m >= 1.0) || !theta.is_finite() || !big_m.is_finite() {
            return Err(Error::OutOfRange(format!("plateau needs θ ≥ 0, M ≥ 1; got {theta}, {big_m}")));
        }
        Ok(WindowFunction::Plateau { theta, big_m })
    }

    fn lower(&self) -> f64 {
        match *self {
            WindowFunction::Bump => 1.0,
            WindowFunction::Plateau { theta, big_m } => big_m.powf(-4.0 * theta),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            WindowFunction::Bump => (1.0, 2.0),
            WindowFunction::Plateau { .. } => (self.lower(), 4.0),
        }
    }

    /// Interval on which the weight is identically 1, if any.
    pub fn plateau_interval(&self) -> Option<(f64, f64)> {
        match self {
            WindowFunction::Bump => None,
            WindowFunction::Plateau { .. } => Some((2.0 * self.lower(), 2.0)),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo || y >= hi {
            return 0.0;
        }
        match self {
            WindowFunction::Bump => {
                let t = 2.0 * y - 3.0;
                (1.0 - 1.0 / (1.0 - t * t)).exp()
            }
            WindowFunction::Plateau { .. } => step((y - lo) / lo) * step((4.0 - y) / 2.0),
        }
    }
}
