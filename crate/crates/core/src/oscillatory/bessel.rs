//! Integer-order Bessel functions of the first kind.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_BESSEL_ORDER: u32 = 200;

const RESCALE_ABOVE: f64 = 1e250;

/// `J_ν(x)` for `0 ≤ ν ≤ 200`, `x ≥ 0`.
///
/// Power series when `x²/4 ≤ (ν+1)/2`, Hankel's expansion when
/// `x ≥ max(50, ν²)`, Miller's backward recurrence otherwise.
pub fn bessel_j(nu: u32, x: f64) -> Result<f64> {
    if nu > MAX_BESSEL_ORDER {
        return Err(Error::OutOfRange(format!("order {nu} exceeds {MAX_BESSEL_ORDER}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange(format!("argument {x} must be finite and nonnegative")));
    }
    if x == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    let v = nu as f64;
    Ok(if x * x / 4.0 <= (v + 1.0) / 2.0 {
        series(nu, x)
    } else if x >= 50f64.max(v * v) {
        hankel(nu, x)
    } else {
        miller(nu, x)
    })
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn series(nu: u32, x: f64) -> f64 {
    let v = nu as f64;
    let q = x * x / 4.0;
    let mut term = (v * (x / 2.0).ln() - ln_factorial(nu)).exp();
    if term == 0.0 {
        return 0.0;
    }
    let mut sum = term;
    let mut j = 0.0;
    loop {
        j += 1.0;
        term *= -q / (j * (v + j));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return sum;
        }
    }
}

fn hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut k = 1u32;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() || next == 0.0 {
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
        k += 1;
    }
    let chi = x - (nu as f64 / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn miller(nu: u32, x: f64) -> f64 {
    let top = (nu as f64).max(x);
    let mut start = (top + 20.0 + 15.0 * top.cbrt()) as u32;
    start += start % 2;
    let (mut above, mut current) = (0.0f64, 1.0f64);
    let mut even_sum = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        if k - 1 == nu {
            wanted = current;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            even_sum += current;
        }
        if current.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            current *= s;
            above *= s;
            even_sum *= s;
            wanted *= s;
        }
    }
    wanted / (current + 2.0 * even_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(nu: u32, x: f64, expect: f64) {
        let got = bessel_j(nu, x).unwrap();
        let tol = (1e-10 * expect.abs()).max(1e-14);
        assert!((got - expect).abs() <= tol, "J_{nu}({x}) = {got}, expected {expect}");
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        for nu in [1, 2, 43, 200] {
            assert_eq!(bessel_j(nu, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn oracle_values() {
        // 30-term series for J_2(1)
        close(2, 1.0, 0.11490348493190048047);
        close(0, 5.0, -0.17759677131433830435);
        close(1, 2.5, 0.49709410246427403801);
        close(7, 12.5, -0.22517790045972311055);
        close(10, 30.0, -0.12987689399858876819);
        close(0, 100.0, 0.019985850304223122424);
        close(5, 60.0, 0.02745474422834409975);
        close(42, 35.0, 0.0043607185243392103263);
        close(60, 200.0, 0.034156500001271929933);
        close(100, 100.0, 0.096366673295861559674);
        close(200, 250.0, -0.0059021679152339692719);
        close(3, 1000.0, -0.0048274208252039478996);
        close(0, 0.1, 0.997501562066040032);
    }

    #[test]
    fn tiny_values_keep_relative_accuracy() {
        let got = bessel_j(42, 0.58).unwrap();
        assert!((got / 1.8714933074526356713e-74 - 1.0).abs() < 1e-10);
        let got = bessel_j(200, 150.0).unwrap();
        assert!((got / 8.0577021983968537965e-14 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn near_a_zero() {
        let got = bessel_j(0, 2.404825557695773).unwrap();
        assert!(got.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bessel_j(201, 1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
    }
}
