//! `J_n` by normalized backward (Miller) recurrence and `Y_n` by upward
//! recurrence from Neumann-series values of `Y_0`, `Y_1`. Both recurrences run
//! on the scaled variables `J_n / s_n` and `Y_n · s_n` so that neither overflow
//! nor underflow occurs for large orders at small arguments. Past
//! `LARGE_ARG` the Miller sweep itself underflows, so orders 0 and 1 come from
//! Hankel's asymptotic expansion and the rest from upward recurrence.

use num_complex::Complex64;

use super::log_scale;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;

/// Smallest `|z|` handled by the asymptotic branch.
pub(super) const LARGE_ARG: f64 = 500.0;

fn large_branch(z: Complex64, nmax: usize) -> bool {
    let x = z.norm();
    // Upward recurrence for J is stable only below the turning point.
    x >= LARGE_ARG && (nmax as f64) <= 0.5 * x
}

/// `(H_ν^(1), H_ν^(2))` for `ν ∈ {0, 1}` by Hankel's expansion.
fn hankel_pair(z: Complex64, nu: u32) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let mu = 4.0 * (nu * nu) as f64;
    let (mut s1, mut s2) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut a = Complex64::new(1.0, 0.0);
    for k in 1..40 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0) / z;
        let ik = i.powi(k);
        s1 += ik * a;
        s2 += ik.conj() * a;
        if a.norm() < 1e-17 {
            break;
        }
    }
    let w = z - (nu as f64 * 0.5 + 0.25) * std::f64::consts::PI;
    let amp = (FRAC_2_PI / z).sqrt();
    (amp * (i * w).exp() * s1, amp * (-i * w).exp() * s2)
}

/// Unscaled `J_n`, `Y_n` for `n = 0..=nmax` on the large-argument branch.
fn jy_large(z: Complex64, nmax: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let half_i = Complex64::new(0.0, 0.5);
    let mut j = Vec::with_capacity(nmax + 2);
    let mut y = Vec::with_capacity(nmax + 2);
    for nu in 0..2 {
        let (h1, h2) = hankel_pair(z, nu);
        j.push((h1 + h2) * 0.5);
        y.push((h1 - h2) * -half_i);
    }
    for n in 1..nmax {
        let f = 2.0 * n as f64 / z;
        j.push(f * j[n] - j[n - 1]);
        y.push(f * y[n] - y[n - 1]);
    }
    j.truncate(nmax + 1);
    y.truncate(nmax + 1);
    (j, y)
}

fn start_order(x: f64, nmax: usize) -> usize {
    let m = (nmax as f64).max(x);
    let s = (m + 30.0 + (50.0 * m).sqrt()).ceil() as usize;
    s + (s & 1)
}

/// Normalized `J_n(z) / s_n(|z|)` for `n = 0..=top` where `top >= nmax`.
fn miller(z: Complex64, nmax: usize) -> Vec<Complex64> {
    let x = z.norm();
    let zero = Complex64::new(0.0, 0.0);
    if x == 0.0 {
        // J_n(z)/s_n(|z|) -> (z/|z|)^n as z -> 0 along the real axis.
        return vec![Complex64::new(1.0, 0.0); nmax + 1];
    }
    let top = start_order(x, nmax);
    let phase = Complex64::new(x, 0.0) / z;
    let q = 0.25 * x * x;
    let mut g = vec![zero; top + 2];
    g[top] = Complex64::new(1.0, 0.0);
    for n in (1..=top).rev() {
        let nf = n as f64;
        g[n - 1] = phase * g[n] - g[n + 1] * (q / (nf * (nf + 1.0)));
    }
    g.truncate(top + 1);
    // 1 = J_0 + 2 Σ J_{2k}
    let mut norm = g[0];
    for k in (2..=top).step_by(2) {
        let s = log_scale(k, x).exp();
        if s == 0.0 && k as f64 > x {
            break;
        }
        norm += g[k] * (2.0 * s);
    }
    let inv = 1.0 / norm;
    for v in g.iter_mut() {
        *v *= inv;
    }
    g
}

pub(super) fn j_scaled(z: Complex64, nmax: usize) -> Vec<Complex64> {
    if large_branch(z, nmax) {
        let x = z.norm();
        let (j, _) = jy_large(z, nmax);
        return j.iter().enumerate().map(|(n, v)| v * (-log_scale(n, x)).exp()).collect();
    }
    let mut g = miller(z, nmax);
    g.truncate(nmax + 1);
    g
}

/// `J_n` and `Y_n · s_n` sharing one Miller sweep. `z != 0`.
fn jy(z: Complex64, nmax: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let x = z.norm();
    if large_branch(z, nmax) {
        let (j, y) = jy_large(z, nmax);
        let jm = j.iter().enumerate().map(|(n, v)| v * (-log_scale(n, x)).exp()).collect();
        let ym = y.iter().enumerate().map(|(n, v)| v * log_scale(n, x).exp()).collect();
        return (jm, ym);
    }
    let g = miller(z, nmax.max(1));
    let top = g.len() - 1;
    let j = |k: usize| g[k] * log_scale(k, x).exp();

    let log_term = (z * 0.5).ln() + EULER_GAMMA;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut k = 1;
    while 2 * k + 1 <= top {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s0 += j(2 * k) * (sign / kf);
        s1 += j(2 * k + 1) * (sign * (2.0 * kf + 1.0) / (kf * (kf + 1.0)));
        k += 1;
    }
    let y0 = FRAC_2_PI * (log_term * j(0)) - 2.0 * FRAC_2_PI * s0;
    let y1 = FRAC_2_PI * (-j(0) / z + (log_term - 1.0) * j(1) - s1);

    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    if nmax >= 1 {
        y.push(y1 * (0.5 * x));
    }
    let q = 0.25 * x * x;
    for n in 1..nmax {
        let nf = n as f64;
        let next = y[n] * (Complex64::new(nf * x, 0.0) / ((nf + 1.0) * z)) - y[n - 1] * (q / (nf * (nf + 1.0)));
        y.push(next);
    }
    let mut jv = g;
    jv.truncate(nmax + 1);
    (jv, y)
}

pub(super) fn y_scaled(z: Complex64, nmax: usize) -> Vec<Complex64> {
    jy(z, nmax).1
}

/// `H_n^(2)(z) · s_n(|z|)`.
pub(super) fn h2_scaled(z: Complex64, nmax: usize) -> Vec<Complex64> {
    let x = z.norm();
    if large_branch(z, nmax) {
        let (j, y) = jy_large(z, nmax);
        let i = Complex64::new(0.0, 1.0);
        return j.iter().zip(&y).enumerate().map(|(n, (a, b))| (a - i * b) * log_scale(n, x).exp()).collect();
    }
    let (j, y) = jy(z, nmax);
    j.iter()
        .zip(&y)
        .enumerate()
        .map(|(n, (jn, yn))| {
            let s2 = (2.0 * log_scale(n, x)).exp();
            jn * s2 - Complex64::new(0.0, 1.0) * yn
        })
        .collect()
}
