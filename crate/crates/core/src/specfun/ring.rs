//! Radial ring integrals `∫ ρ′ G_n(kρ′) dρ′` and `∫ G_n(kρ′) dρ′`.
//!
//! Orders 0 and 1 use closed-form antiderivatives (Struve-function forms for
//! `∫G_0` and `∫ρ′G_1`). Higher orders follow the two-step upward recurrences
//!
//! ```text
//! ∫ρ′G_n = (2(n−1)/k) ∫G_{n−1} − ∫ρ′G_{n−2}
//! ∫G_n   = ∫G_{n−2} − (2/k) [G_{n−1}]
//! ```
//!
//! run separately for the `J` and `Y` families (`H^(2) = J − jY`). The `Y`
//! recurrence runs in the growing direction and is carried in scaled
//! variables. The `J` recurrence loses digits once `n` exceeds `|k|ρ`; a
//! running magnitude bound detects the cancellation, after which each order is
//! taken from the convergent small-argument series (inside the asymptotic
//! regime) or from adaptive quadrature.

use std::f64::consts::{E, FRAC_2_PI, PI};

use num_complex::Complex64;

use super::{bessel_scaled, log_scale, neumann_scaled, struve_complex, CylKind, Scaled};
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// A recursion result whose magnitude falls below this fraction of the
/// largest term that fed into it is discarded.
pub const CANCELLATION_RATIO: f64 = 1e-5;

/// Largest `|k|·upper` for which the Struve closed forms seed the recursion.
pub const STRUVE_CLOSED_FORM_LIMIT: f64 = 12.0;

const J: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingInterval {
    pub lower: f64,
    pub upper: f64,
    pub k: Complex64,
}

impl RingInterval {
    pub fn new(lower: f64, upper: f64, k: Complex64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && k.re.is_finite() && k.im.is_finite()) {
            return Err(Error::domain("non-finite ring interval"));
        }
        if lower < 0.0 || upper < lower {
            return Err(Error::domain(format!("invalid ring interval [{lower}, {upper}]")));
        }
        if k == ZERO {
            return Err(Error::domain("zero wavenumber"));
        }
        Ok(Self { lower, upper, k })
    }

    pub fn is_empty(&self) -> bool {
        self.lower == self.upper
    }
}

/// How a ring-integral value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Empty,
    ClosedForm,
    Recursion,
    SmallArgumentSeries,
    Quadrature,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RouteCounts {
    pub empty: usize,
    pub closed_form: usize,
    pub recursion: usize,
    pub series: usize,
    pub quadrature: usize,
}

impl RouteCounts {
    pub fn record(&mut self, route: Route) {
        match route {
            Route::Empty => self.empty += 1,
            Route::ClosedForm => self.closed_form += 1,
            Route::Recursion => self.recursion += 1,
            Route::SmallArgumentSeries => self.series += 1,
            Route::Quadrature => self.quadrature += 1,
        }
    }

    pub fn merge(&mut self, other: &RouteCounts) {
        self.empty += other.empty;
        self.closed_form += other.closed_form;
        self.recursion += other.recursion;
        self.series += other.series;
        self.quadrature += other.quadrature;
    }

    pub fn total(&self) -> usize {
        self.empty + self.closed_form + self.recursion + self.series + self.quadrature
    }
}

/// `n ≥ 12` and `e·|k|·upper / (2n) < 0.25`.
pub fn in_asymptotic_regime(n: usize, k_abs: f64, upper: f64) -> bool {
    n >= 12 && E * k_abs * upper / (2.0 * n as f64) < 0.25
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    J,
    Y,
}

/// `(G_0(x), G_1(x))`, unscaled.
fn g01(family: Family, x: Complex64) -> Result<(Complex64, Complex64)> {
    match family {
        Family::J => {
            let v = bessel_scaled(1, x)?;
            Ok((v[0], v[1] * (0.5 * x.norm())))
        }
        Family::Y => {
            let v = neumann_scaled(1, x)?;
            Ok((v[0], v[1] / (0.5 * x.norm())))
        }
    }
}

/// `(ρ/k) G_1(kρ)`; at ρ = 0 the J term vanishes and `ρY_1(kρ)/k → −2/(πk²)`.
fn anti_rho_g0(family: Family, rho: f64, k: Complex64) -> Result<Complex64> {
    if rho == 0.0 {
        return Ok(match family {
            Family::J => ZERO,
            Family::Y => -FRAC_2_PI / (k * k),
        });
    }
    let (_, g1) = g01(family, k * rho)?;
    Ok(g1 * rho / k)
}

/// `ρG_0 + (π/2) ρ [H_0 G_1 − H_1 G_0]` at `kρ`; zero at ρ = 0 for both families.
fn anti_g0(family: Family, rho: f64, k: Complex64) -> Result<Complex64> {
    if rho == 0.0 {
        return Ok(ZERO);
    }
    let x = k * rho;
    let (g0, g1) = g01(family, x)?;
    let (h0, h1) = (struve_complex(0, x)?, struve_complex(1, x)?);
    Ok(rho * g0 + 0.5 * PI * rho * (h0 * g1 - h1 * g0))
}

/// `−G_0(kρ)/k`; the Y member diverges at ρ = 0.
fn anti_g1(family: Family, rho: f64, k: Complex64) -> Result<Complex64> {
    if rho == 0.0 {
        return match family {
            Family::J => Ok(-1.0 / k),
            Family::Y => Err(Error::domain("∫Y_1 diverges at the origin")),
        };
    }
    let (g0, _) = g01(family, k * rho)?;
    Ok(-g0 / k)
}

/// `(π/(2k)) ρ [H_0 G_1 − H_1 G_0]` at `kρ`; zero at ρ = 0.
fn anti_rho_g1(family: Family, rho: f64, k: Complex64) -> Result<Complex64> {
    if rho == 0.0 {
        return Ok(ZERO);
    }
    let x = k * rho;
    let (g0, g1) = g01(family, x)?;
    let (h0, h1) = (struve_complex(0, x)?, struve_complex(1, x)?);
    Ok(0.5 * PI / k * rho * (h0 * g1 - h1 * g0))
}

type Anti = fn(Family, f64, Complex64) -> Result<Complex64>;

/// Antiderivative difference and the sum of endpoint magnitudes.
fn diff(anti: Anti, family: Family, iv: &RingInterval) -> Result<(Complex64, f64)> {
    let hi = anti(family, iv.upper, iv.k)?;
    let lo = anti(family, iv.lower, iv.k)?;
    Ok((hi - lo, hi.norm() + lo.norm()))
}

fn by_kind(kind: CylKind, anti: Anti, iv: &RingInterval) -> Result<Complex64> {
    if iv.is_empty() {
        return Ok(ZERO);
    }
    let (j, _) = diff(anti, Family::J, iv)?;
    Ok(match kind {
        CylKind::BesselJ => j,
        CylKind::Hankel2 => j - J * diff(anti, Family::Y, iv)?.0,
    })
}

/// `∫ ρ′G_0(kρ′) dρ′ = [(ρ′/k) G_1(kρ′)]`.
pub fn integral_rho_g0(kind: CylKind, iv: &RingInterval) -> Result<Complex64> {
    by_kind(kind, anti_rho_g0, iv)
}

/// `∫ G_0(kρ′) dρ′` via the Struve-function antiderivative.
pub fn integral_g0(kind: CylKind, iv: &RingInterval) -> Result<Complex64> {
    by_kind(kind, anti_g0, iv)
}

/// `∫ G_1(kρ′) dρ′ = −[G_0(kρ′)]/k`.
pub fn integral_g1(kind: CylKind, iv: &RingInterval) -> Result<Complex64> {
    by_kind(kind, anti_g1, iv)
}

/// `∫ ρ′G_1(kρ′) dρ′` via the Struve-function antiderivative.
pub fn integral_rho_g1(kind: CylKind, iv: &RingInterval) -> Result<Complex64> {
    by_kind(kind, anti_rho_g1, iv)
}

/// Per-order results for one family. Mantissas of both the weighted and the
/// plain integral share `log_scale[n]`.
struct FamilyBatch {
    log_scale: Vec<f64>,
    rho: Vec<Complex64>,
    plain: Vec<Complex64>,
    rho_route: Vec<Route>,
    plain_route: Vec<Route>,
}

impl FamilyBatch {
    fn empty(nmax: usize) -> Self {
        Self {
            log_scale: vec![0.0; nmax + 1],
            rho: vec![ZERO; nmax + 1],
            plain: vec![ZERO; nmax + 1],
            rho_route: vec![Route::Empty; nmax + 1],
            plain_route: vec![Route::Empty; nmax + 1],
        }
    }
}

fn quad_tol() -> Tolerance {
    Tolerance { abs: 1e-300, rel: 1e-13, max_intervals: 4000 }
}

fn checked(r: quad::QuadResult, what: &str) -> Result<Complex64> {
    if r.converged || r.error <= 1e-10 * r.value.norm() {
        Ok(r.value)
    } else {
        Err(Error::numerical(format!("quadrature of {what} did not converge (error {:.3e})", r.error)))
    }
}

/// `∫ ρ^w J_n(kρ) dρ / s_n(|k|·upper)` by adaptive quadrature.
fn j_quad(n: usize, weighted: bool, iv: &RingInterval) -> Result<Complex64> {
    let (b, k) = (iv.upper, iv.k);
    let mut failure = None;
    let r = quad::integrate(
        |rho| {
            let jn = match bessel_scaled(n, k * rho) {
                Ok(v) => v[n],
                Err(e) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            };
            let w = if weighted { rho } else { 1.0 };
            jn * (w * (rho / b).powi(n as i32))
        },
        iv.lower,
        iv.upper,
        quad_tol(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    checked(r, "a Bessel ring integrand")
}

/// `∫ ρ^w Y_n(kρ) dρ · s_n(|k|·reference)` by adaptive quadrature.
fn y_quad(n: usize, weighted: bool, iv: &RingInterval, reference: f64) -> Result<Complex64> {
    let k = iv.k;
    let mut failure = None;
    let r = quad::integrate(
        |rho| {
            if rho == 0.0 {
                // Endpoint never sampled by Gauss–Kronrod; guard anyway.
                return ZERO;
            }
            let yn = match neumann_scaled(n, k * rho) {
                Ok(v) => v[n],
                Err(e) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            };
            let w = if weighted { rho } else { 1.0 };
            yn * (w * (reference / rho).powi(n as i32))
        },
        iv.lower,
        iv.upper,
        quad_tol(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    checked(r, "a Neumann ring integrand")
}

/// `1 − r^p` for `0 ≤ r ≤ 1`, accurate when `r → 1`.
fn one_minus_pow(r: f64, p: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        -(p * r.ln()).exp_m1()
    }
}

/// Small-argument series of `∫ ρ^w J_n(kρ) dρ / s_n(|k|·upper)`:
/// `Σ_j (−1)^j (k/2)^{n+2j} / (j!(n+j)!) · (b^{p} − a^{p}) / p`, `p = n+2j+1+w`.
fn j_series(n: usize, weighted: bool, iv: &RingInterval) -> Result<Complex64> {
    let (a, b, k) = (iv.lower, iv.upper, iv.k);
    let phase = (k / k.norm()).powi(n as i32);
    let w = 0.25 * (k * b) * (k * b);
    let r = a / b;
    let offset = if weighted { 2.0 } else { 1.0 };
    let mut c = Complex64::new(1.0, 0.0);
    let mut sum = ZERO;
    for j in 0..10_000usize {
        if j > 0 {
            let jf = j as f64;
            c *= -w / (jf * (n as f64 + jf));
        }
        let p = n as f64 + 2.0 * j as f64 + offset;
        let term = c * (one_minus_pow(r, p) / p);
        sum += term;
        let decreasing = (j as f64 + 1.0) * (n as f64 + j as f64 + 1.0) > w.norm();
        if j > 0 && decreasing && term.norm() <= 1e-17 * sum.norm() {
            let len = if weighted { b * b } else { b };
            return Ok(phase * sum * len);
        }
    }
    Err(Error::numerical("ring-integral series did not converge"))
}

struct Tracker {
    value: Complex64,
    magnitude: f64,
}

fn accurate(value: Complex64, magnitude: f64) -> bool {
    value.re.is_finite() && value.im.is_finite() && value.norm() >= CANCELLATION_RATIO * magnitude
}

fn j_batch(nmax: usize, iv: &RingInterval) -> Result<FamilyBatch> {
    let mut out = FamilyBatch::empty(nmax);
    if iv.is_empty() {
        return Ok(out);
    }
    let (a, b, k) = (iv.lower, iv.upper, iv.k);
    let kabs = k.norm();
    for n in 0..=nmax {
        out.log_scale[n] = log_scale(n, kabs * b);
    }
    let jb = bessel_scaled(nmax.max(1), k * b)?;
    let ja = bessel_scaled(nmax.max(1), k * a)?;
    let unscaled = |m: &[Complex64], n: usize, rho: f64| {
        if m[n] == ZERO {
            ZERO
        } else {
            m[n] * log_scale(n, kabs * rho).exp()
        }
    };

    let (i0, mag_i0) = diff(anti_rho_g0, Family::J, iv)?;
    let (p1, mag_p1) = diff(anti_g1, Family::J, iv)?;
    let seeds_closed = kabs * b <= STRUVE_CLOSED_FORM_LIMIT;
    let (p0, mag_p0) = if seeds_closed { diff(anti_g0, Family::J, iv)? } else { (ZERO, f64::INFINITY) };
    let (i1, mag_i1) = if seeds_closed { diff(anti_rho_g1, Family::J, iv)? } else { (ZERO, f64::INFINITY) };

    let mut p: Vec<Tracker> = Vec::with_capacity(nmax + 1);
    let mut i: Vec<Tracker> = Vec::with_capacity(nmax + 1);
    p.push(Tracker { value: p0, magnitude: mag_p0 });
    p.push(Tracker { value: p1, magnitude: mag_p1 });
    i.push(Tracker { value: i0, magnitude: mag_i0 });
    i.push(Tracker { value: i1, magnitude: mag_i1 });

    let mut broken_from = nmax + 1;
    for n in 0..=nmax {
        if n >= 2 {
            let two_over_k = 2.0 / k;
            let (jb1, ja1) = (unscaled(&jb, n - 1, b), unscaled(&ja, n - 1, a));
            let pn = p[n - 2].value - two_over_k * (jb1 - ja1);
            let mp = p[n - 2].magnitude.max(two_over_k.norm() * (jb1.norm() + ja1.norm()));
            let factor = 2.0 * (n as f64 - 1.0) / k;
            let i_n = factor * p[n - 1].value - i[n - 2].value;
            let mi = (factor.norm() * p[n - 1].magnitude).max(i[n - 2].magnitude);
            p.push(Tracker { value: pn, magnitude: mp });
            i.push(Tracker { value: i_n, magnitude: mi });
        }
        let ok = accurate(i[n].value, i[n].magnitude) && accurate(p[n].value, p[n].magnitude);
        if !ok {
            broken_from = n;
            break;
        }
        let inv = (-out.log_scale[n]).exp();
        out.rho[n] = i[n].value * inv;
        out.plain[n] = p[n].value * inv;
        let route = if n <= 1 { Route::ClosedForm } else { Route::Recursion };
        out.rho_route[n] = route;
        out.plain_route[n] = route;
    }

    for n in broken_from..=nmax {
        if in_asymptotic_regime(n, kabs, b) {
            out.rho[n] = j_series(n, true, iv)?;
            out.plain[n] = j_series(n, false, iv)?;
            out.rho_route[n] = Route::SmallArgumentSeries;
            out.plain_route[n] = Route::SmallArgumentSeries;
        } else {
            out.rho[n] = j_quad(n, true, iv)?;
            out.plain[n] = j_quad(n, false, iv)?;
            out.rho_route[n] = Route::Quadrature;
            out.plain_route[n] = Route::Quadrature;
        }
    }
    Ok(out)
}

/// Y-family batch. Mantissas are relative to `1/s_n(|k|·reference)` with
/// `reference = lower` (or `upper` when `lower = 0`, where only `n ≤ 1` of the
/// weighted integral and `n = 0` of the plain integral exist).
fn y_batch(nmax: usize, iv: &RingInterval) -> Result<FamilyBatch> {
    let mut out = FamilyBatch::empty(nmax);
    if iv.is_empty() {
        return Ok(out);
    }
    let (a, b, k) = (iv.lower, iv.upper, iv.k);
    if a == 0.0 && nmax >= 2 {
        return Err(Error::domain("∫ρ′Y_n from the origin diverges for n ≥ 2"));
    }
    let kabs = k.norm();
    let reference = if a > 0.0 { a } else { b };
    let xr = 0.5 * kabs * reference;
    for n in 0..=nmax {
        out.log_scale[n] = -log_scale(n, kabs * reference);
    }

    let (i0, mag_i0) = diff(anti_rho_g0, Family::Y, iv)?;
    let seeds_closed = kabs * b <= STRUVE_CLOSED_FORM_LIMIT;
    let (p0, mag_p0) = if seeds_closed { diff(anti_g0, Family::Y, iv)? } else { (ZERO, f64::INFINITY) };
    let (i1, mag_i1) = if seeds_closed { diff(anti_rho_g1, Family::Y, iv)? } else { (ZERO, f64::INFINITY) };
    let (p1, mag_p1) = if a > 0.0 { diff(anti_g1, Family::Y, iv)? } else { (Complex64::new(f64::INFINITY, 0.0), 0.0) };

    let mut p = vec![Tracker { value: p0, magnitude: mag_p0 }, Tracker { value: p1 * xr, magnitude: mag_p1 * xr }];
    let mut i = vec![Tracker { value: i0, magnitude: mag_i0 }, Tracker { value: i1 * xr, magnitude: mag_i1 * xr }];

    if a > 0.0 && nmax >= 1 {
        let yb = neumann_scaled(nmax, k * b)?;
        let ya = neumann_scaled(nmax, k * a)?;
        let ln_ratio = (a / b).ln();
        for n in 2..=nmax {
            let nf = n as f64;
            let shrink = xr * xr / (nf * (nf - 1.0));
            let step = 2.0 / k * (xr / nf);
            let yb1 = yb[n - 1] * ((nf - 1.0) * ln_ratio).exp();
            let ya1 = ya[n - 1];
            let pn = p[n - 2].value * shrink - step * (yb1 - ya1);
            let mp = (p[n - 2].magnitude * shrink).max(step.norm() * (yb1.norm() + ya1.norm()));
            let factor = 2.0 * (nf - 1.0) / k * (xr / nf);
            let i_n = factor * p[n - 1].value - i[n - 2].value * shrink;
            let mi = (factor.norm() * p[n - 1].magnitude).max(i[n - 2].magnitude * shrink);
            p.push(Tracker { value: pn, magnitude: mp });
            i.push(Tracker { value: i_n, magnitude: mi });
        }
    }

    for n in 0..=nmax {
        let recursive = if n <= 1 { Route::ClosedForm } else { Route::Recursion };
        if accurate(i[n].value, i[n].magnitude) {
            out.rho[n] = i[n].value;
            out.rho_route[n] = recursive;
        } else {
            out.rho[n] = y_quad(n, true, iv, reference)?;
            out.rho_route[n] = Route::Quadrature;
        }
        if a == 0.0 && n >= 1 {
            out.plain[n] = Complex64::new(f64::INFINITY, 0.0);
            out.plain_route[n] = Route::Empty;
        } else if accurate(p[n].value, p[n].magnitude) {
            out.plain[n] = p[n].value;
            out.plain_route[n] = recursive;
        } else {
            out.plain[n] = y_quad(n, false, iv, reference)?;
            out.plain_route[n] = Route::Quadrature;
        }
    }
    Ok(out)
}

/// Weighted and plain ring integrals of orders `0..=nmax`.
#[derive(Clone, Debug)]
pub struct RingSeries {
    pub kind: CylKind,
    pub interval: RingInterval,
    pub rho: Vec<Scaled>,
    pub plain: Vec<Scaled>,
    pub rho_route: Vec<Route>,
    pub plain_route: Vec<Route>,
}

impl RingSeries {
    pub fn counts(&self) -> RouteCounts {
        let mut c = RouteCounts::default();
        for &r in &self.rho_route {
            c.record(r);
        }
        c
    }
}

/// All orders `0..=nmax` of `∫ρ′G_n` and `∫G_n` over the interval.
///
/// For `Hankel2` with `lower = 0` only `nmax ≤ 1` is accepted (the weighted
/// integral diverges for `n ≥ 2`) and the plain integrals of order ≥ 1 are
/// reported as infinite.
pub fn ring_integrals(kind: CylKind, nmax: usize, iv: &RingInterval) -> Result<RingSeries> {
    let jb = j_batch(nmax, iv)?;
    let mut rho: Vec<Scaled> = (0..=nmax).map(|n| Scaled::new(jb.rho[n], jb.log_scale[n])).collect();
    let mut plain: Vec<Scaled> = (0..=nmax).map(|n| Scaled::new(jb.plain[n], jb.log_scale[n])).collect();
    let mut rho_route = jb.rho_route;
    let mut plain_route = jb.plain_route;
    if kind == CylKind::Hankel2 {
        let yb = y_batch(nmax, iv)?;
        for n in 0..=nmax {
            let y_rho = Scaled::new(-J * yb.rho[n], yb.log_scale[n]);
            rho[n] = rho[n].add(y_rho);
            rho_route[n] = rho_route[n].max(yb.rho_route[n]);
            if yb.plain[n].re.is_infinite() {
                plain[n] = Scaled::new(yb.plain[n], 0.0);
            } else {
                plain[n] = plain[n].add(Scaled::new(-J * yb.plain[n], yb.log_scale[n]));
                plain_route[n] = plain_route[n].max(yb.plain_route[n]);
            }
        }
    }
    Ok(RingSeries { kind, interval: *iv, rho, plain, rho_route, plain_route })
}

pub fn ring_integral_scaled(kind: CylKind, n: usize, iv: &RingInterval) -> Result<(Scaled, Route)> {
    let s = ring_integrals(kind, n, iv)?;
    Ok((s.rho[n], s.rho_route[n]))
}

/// `∫ ρ′G_n(kρ′) dρ′` over the interval, `n ≥ 0`.
pub fn ring_integral(kind: CylKind, n: usize, iv: &RingInterval) -> Result<Complex64> {
    Ok(ring_integral_scaled(kind, n, iv)?.0.value())
}

/// `∫ G_n(kρ′) dρ′` over the interval, `n ≥ 0`.
pub fn ring_integral_plain(kind: CylKind, n: usize, iv: &RingInterval) -> Result<Complex64> {
    if kind == CylKind::Hankel2 && iv.lower == 0.0 && n >= 1 && !iv.is_empty() {
        return Err(Error::domain("∫H_n^(2) from the origin diverges for n ≥ 1"));
    }
    if kind == CylKind::Hankel2 && iv.lower == 0.0 {
        return Ok(ring_integrals(kind, n, iv)?.plain[n].value());
    }
    Ok(ring_integrals(kind, n, iv)?.plain[n].value())
}

/// Leading-order small-argument value of `∫ ρ′G_n(kρ′) dρ′`.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticValue {
    pub value: Scaled,
    /// Set when the Hankel branch hit `n = 2`, where `ρ′^{1−n}` integrates
    /// to a logarithm instead of a power.
    pub log_branch: bool,
}

/// Leading-order asymptotic ring integral with
/// `J_n(x) ≈ (ex/2n)^n / √(2πn)` and `Y_n(x) ≈ −2 (ex/2n)^{−n} / √(2πn)`.
/// Powers are carried as logarithms so nothing over- or underflows.
pub fn asymptotic_ring_integral(kind: CylKind, n: usize, iv: &RingInterval) -> Result<AsymptoticValue> {
    if n == 0 {
        return Err(Error::domain("asymptotic form needs n ≥ 1"));
    }
    if iv.is_empty() {
        return Ok(AsymptoticValue { value: Scaled::ZERO, log_branch: false });
    }
    let (a, b, k) = (iv.lower, iv.upper, iv.k);
    let nf = n as f64;
    let norm = 1.0 / (std::f64::consts::TAU * nf).sqrt();
    // ln a_n = n ln(e k / (2n)), complex.
    let ln_an = (k * (E / (2.0 * nf))).ln() * nf;
    let phase = Complex64::new(0.0, ln_an.im).exp();

    let p = nf + 2.0;
    let j_part = Scaled::new(phase * (norm * one_minus_pow(a / b, p) / p), ln_an.re + p * b.ln());
    if kind == CylKind::BesselJ {
        return Ok(AsymptoticValue { value: j_part, log_branch: false });
    }

    let inv_phase = phase.inv();
    let (y_part, log_branch) = if n == 2 {
        if a == 0.0 {
            return Err(Error::domain("∫ρ′H_2^(2) from the origin diverges"));
        }
        (Scaled::new(2.0 * J * inv_phase * (norm * (b / a).ln()), -ln_an.re), true)
    } else if n == 1 {
        (Scaled::new(2.0 * J * inv_phase * (norm * (b - a)), -ln_an.re), false)
    } else {
        if a == 0.0 {
            return Err(Error::domain("∫ρ′H_n^(2) from the origin diverges for n > 2"));
        }
        // (b^{2−n} − a^{2−n}) / (2−n) = a^{2−n} (1 − (a/b)^{n−2}) / (n−2)
        let q = nf - 2.0;
        (Scaled::new(2.0 * J * inv_phase * (norm * one_minus_pow(a / b, q) / q), -ln_an.re + (2.0 - nf) * a.ln()), false)
    };
    Ok(AsymptoticValue { value: j_part.add(y_part), log_branch })
}
