//! Test-only reference implementations. None of this shares code with the
//! library: quadrature is double-exponential (tanh-sinh) rather than
//! Gauss–Kronrod, and cylinder functions come from their integral
//! representations rather than recurrences.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Tanh-sinh quadrature on `[a, b]`, refined until two successive levels
/// agree to `rel` (relative to the running magnitude of the integrand sum).
pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, rel: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
        let d = 0.5 * (b - a);
    // Abscissae written as distance from the nearer endpoint to avoid
    // catastrophic rounding next to end singularities.
    let node = |t: f64| -> (f64, f64, f64) {
        let s = FRAC_PI_2 * t.sinh();
        let u = (-2.0 * s.abs()).exp();
        let gap = 2.0 * u / (1.0 + u); // 1 − |tanh(s)|
        let w = FRAC_PI_2 * t.cosh() * 4.0 * u / ((1.0 + u) * (1.0 + u));
        (s.signum(), gap, w)
    };
    let eval = |t: f64| -> Complex64 {
        let (sign, gap, w) = node(t);
        if w < 1e-300 || gap == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = if sign >= 0.0 { b - d * gap } else { a + d * gap };
        if x <= a || x >= b {
            return Complex64::new(0.0, 0.0);
        }
        f(x) * w
    };
    let tmax = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut mass = sum.norm();
    let mut t = h;
    while t <= tmax {
        let (p, m) = (eval(t), eval(-t));
        sum += p + m;
        mass += p.norm() + m.norm();
        t += h;
    }
    let mut prev = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut t = h;
        while t <= tmax {
            let (p, m) = (eval(t), eval(-t));
            sum += p + m;
            mass += p.norm() + m.norm();
            t += 2.0 * h;
        }
        let cur = sum * h;
        // The error roughly squares per level, so a level-to-level change of
        // about sqrt(rel) leaves `rel` behind.
        let scale = cur.norm().max(1e-3 * mass * h);
        if (cur - prev).norm() <= 1e-2 * rel.sqrt() * scale {
            return cur * d;
        }
        prev = cur;
    }
    prev * d
}

/// `J_n(x)`, real `x`: power series where the argument is small relative to
/// the order (the integral form cancels there), otherwise
/// `(1/π)∫_0^π cos(nθ − x sin θ) dθ`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    // The series loses about ε·Σ|terms| and the integral about ε absolutely,
    // so the series wins whenever Σ|terms| < 1.
    if n >= 0 && (x < 8.0 || x < n as f64 + 10.0) {
        let (sum, magnitude) = bessel_j_series_with_magnitude(n as u32, x);
        if x < 8.0 || magnitude < 1.0 {
            return sum;
        }
    }
    let v = tanh_sinh(|t| Complex64::new((n as f64 * t - x * t.sin()).cos(), 0.0), 0.0, PI, 1e-15);
    v.re / PI
}

/// `Y_n(x)` from the Schläfli integral, real `x > 0`, `n ≥ 0`.
pub fn bessel_y(n: i32, x: f64) -> f64 {
    let nf = n as f64;
    let first = tanh_sinh(|t| Complex64::new((x * t.sin() - nf * t).sin(), 0.0), 0.0, PI, 1e-15).re / PI;
    // e^{nt − x sinh t} is negligible once x sinh t − nt > 750
    let mut upper = 1.0;
    while x * f64::sinh(upper) - nf * upper < 60.0 + nf.max(1.0).ln() {
        upper += 0.5;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let second = tanh_sinh(
        |t| Complex64::new(((nf * t - x * t.sinh()).exp()) + sign * ((-nf * t - x * t.sinh()).exp()), 0.0),
        0.0,
        upper,
        1e-15,
    )
    .re
        / PI;
    first - second
}

pub fn hankel2(n: i32, x: f64) -> Complex64 {
    Complex64::new(bessel_j(n, x), -bessel_y(n, x))
}

/// `J_n(x)` from the power series, summed until terms drop below 1e-17 of
/// the sum. Reliable for `x` below about 10.
pub fn bessel_j_series(n: u32, x: f64) -> f64 {
    bessel_j_series_with_magnitude(n, x).0
}

/// The series sum and the sum of its absolute terms.
fn bessel_j_series_with_magnitude(n: u32, x: f64) -> (f64, f64) {
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    let mut magnitude = term.abs();
    let w = -0.25 * x * x;
    for j in 1..500 {
        term *= w / (j as f64 * (n + j) as f64);
        sum += term;
        magnitude += term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (sum, magnitude)
}

/// `(2/π)∫_0^{π/2} sin(u cos θ) dθ` and `(2u/π)∫_0^{π/2} sin(u cos θ) sin²θ dθ`.
pub fn struve_integral(order: u32, u: f64) -> f64 {
    let v = match order {
        0 => tanh_sinh(|t| Complex64::new((u * t.cos()).sin(), 0.0), 0.0, FRAC_PI_2, 1e-15).re,
        _ => u * tanh_sinh(|t| Complex64::new((u * t.cos()).sin() * t.sin().powi(2), 0.0), 0.0, FRAC_PI_2, 1e-15).re,
    };
    2.0 * v / PI
}

/// `∫ ρ^w G_n(kρ) dρ` over `[a, b]` with real `k`, built from the integral
/// representations above.
pub fn ring_oracle(hankel: bool, n: i32, weighted: bool, a: f64, b: f64, k: f64) -> Complex64 {
    tanh_sinh(
        |rho| {
            let g = if hankel { hankel2(n, k * rho) } else { Complex64::new(bessel_j(n, k * rho), 0.0) };
            if weighted {
                g * rho
            } else {
                g
            }
        },
        a,
        b,
        1e-13,
    )
}

pub fn rel_err(reference: Complex64, value: Complex64) -> f64 {
    (reference - value).norm() / reference.norm().max(1e-300)
}

pub fn rel_err_vec(reference: &[Complex64], value: &[Complex64]) -> f64 {
    let num: f64 = reference.iter().zip(value).map(|(r, v)| (r - v).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|r| r.norm_sqr()).sum();
    (num / den).sqrt()
}
