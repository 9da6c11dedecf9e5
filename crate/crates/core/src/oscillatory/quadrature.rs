//! Adaptive Gauss–Legendre quadrature for oscillatory complex integrands.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const GAUSS_ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub est_error: f64,
    pub panels: usize,
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / deriv;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * deriv * deriv)));
    }
    out
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    rule()
        .iter()
        .map(|&(x, w)| f(mid + half * x) * w)
        .sum::<Complex64>()
        * half
}

/// Integrates `f` over `[a, b]` to absolute accuracy `tol`, starting from
/// panels no wider than `max_width`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    max_width: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(b > a) {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            panels: 0,
        });
    }
    if !(max_width > 0.0) || !(tol > 0.0) {
        return Err(Error::OutOfRange("panel width and tolerance must be positive".into()));
    }
    let initial = ((b - a) / max_width).ceil().max(1.0);
    if initial > MAX_PANELS as f64 {
        return Err(Error::QuadratureNonConvergence(format!(
            "{initial} initial panels exceed {MAX_PANELS}"
        )));
    }
    let count = initial as usize;
    let width = (b - a) / count as f64;
    let mut stack: Vec<(f64, f64, Complex64, u32)> = (0..count)
        .rev()
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == count { b } else { lo + width };
            (lo, hi, panel(&f, lo, hi), 0)
        })
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    let (mut est, mut magnitude) = (0.0, 0.0);
    let mut panels = 0usize;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = (lo + hi) / 2.0;
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let halves = left + right;
        let diff = (whole - halves).norm();
        let local = tol * (hi - lo) / (b - a);
        if diff <= local || diff <= 4.0 * f64::EPSILON * (left.norm() + right.norm()) {
            value += halves;
            est += diff;
            magnitude += left.norm() + right.norm();
            panels += 1;
            continue;
        }
        if depth >= MAX_DEPTH || stack.len() + panels > MAX_PANELS {
            return Err(Error::QuadratureNonConvergence(format!(
                "refinement stalled on [{lo}, {hi}] with difference {diff:e}"
            )));
        }
        stack.push((mid, hi, right, depth + 1));
        stack.push((lo, mid, left, depth + 1));
    }
    Ok(QuadratureResult {
        value,
        est_error: est + 4.0 * f64::EPSILON * magnitude,
        panels,
    })
}
