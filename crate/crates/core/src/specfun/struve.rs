//! Struve functions of orders zero and one: the power series near the origin,
//! Gauss–Legendre on the integral representations further out.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Default bound on `|u|` beyond which evaluation is refused.
pub const STRUVE_SERIES_LIMIT: f64 = 60.0;

/// The alternating series loses about `e^{|z|}/|z|` in relative accuracy, so
/// it is kept to small arguments.
const SERIES_SWITCH: f64 = 4.0;

/// Enough nodes for machine precision up to `|z| = 60`.
const GL_NODES: usize = 96;

const REL_STOP: f64 = 1e-15;

pub fn struve(order: u8, u: f64) -> Result<f64> {
    struve_with_limit(order, u, STRUVE_SERIES_LIMIT)
}

pub fn struve_with_limit(order: u8, u: f64, limit: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::domain(format!("non-finite Struve argument {u}")));
    }
    Ok(struve_series(order, Complex64::new(u, 0.0), limit)?.re)
}

/// Series continued to complex arguments.
pub fn struve_complex(order: u8, z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("non-finite Struve argument {z}")));
    }
    struve_series(order, z, STRUVE_SERIES_LIMIT)
}

fn struve_series(order: u8, z: Complex64, limit: f64) -> Result<Complex64> {
    if order > 1 {
        return Err(Error::domain(format!("Struve order {order} not supported (only 0 and 1)")));
    }
    if z.norm() > limit {
        return Err(Error::Range(format!(
            "Struve series argument |{z}| exceeds {limit}; use an asymptotic or quadrature evaluation"
        )));
    }
    if z.norm() > SERIES_SWITCH {
        return Ok(struve_integral(order, z));
    }
    let z2 = z * z;
    // H0: t_k = (-1)^k z^(2k+1) / ((2k+1)!!)^2
    // H1: t_k = (-1)^k z^(2k+2) / (((2k+1)!!)^2 (2k+3))
    let mut base = z; // (-1)^k z^(2k+1) / ((2k+1)!!)^2
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        let term = if order == 0 { base } else { base * z / (2.0 * k as f64 + 3.0) };
        sum += term;
        if k > 0 && term.norm() < REL_STOP * sum.norm() {
            break;
        }
        if sum.norm() == 0.0 && term.norm() == 0.0 {
            break;
        }
        let d = 2.0 * k as f64 + 3.0;
        base *= -z2 / (d * d);
        k += 1;
        if k > 10_000 {
            return Err(Error::numerical("Struve series failed to converge"));
        }
    }
    Ok(sum * std::f64::consts::FRAC_2_PI)
}

/// `H_0 = (2/π)∫_0^{π/2} sin(z cosθ) dθ` and
/// `H_1 = (2z/π)∫_0^{π/2} sin(z cosθ) sin²θ dθ`. The integrands are entire.
fn struve_integral(order: u8, z: Complex64) -> Complex64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| gauss_legendre(GL_NODES));
    let half = 0.5 * FRAC_PI_2;
    let mut sum = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        let theta = half * (xi + 1.0);
        let (s, c) = theta.sin_cos();
        let f = (z * c).sin();
        sum += if order == 0 { f * wi } else { f * (wi * s * s) };
    }
    let v = sum * (half * std::f64::consts::FRAC_2_PI);
    if order == 0 {
        v
    } else {
        v * z
    }
}
