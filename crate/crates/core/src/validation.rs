//! Self-checks against the oracles, run by `polarmom validate`.
//!
//! Each check is a scaled-down version of a test-suite property so the whole
//! set finishes in seconds.

use std::f64::consts::{FRAC_PI_2, TAU};
use web_time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cartesian::{count_mults_2d, CartesianKernel};
use crate::error::Result;
use crate::model::{free_space_wavelength, incident_field, wavenumber, CartesianGrid, Material, ObservationCircle, PolarField, PolarGrid};
use crate::oracle::{analytic_scattered, direct_quadrature_potential, relative_error, scattering_coefficients, CellSet, LayeredCylinder};
use crate::polar::{accumulate_inward, accumulate_outward, angular_spectrum, count_mults_1d, harmonic_of_bin, PolarOperator, RingIntegralTable};
use crate::quad::{integrate, Tolerance};
use crate::solver::{bcgs_solve, ForwardOperator};
use crate::specfun::{cyl_fn, cyl_orders, CylKind, Scaled};

const FREQUENCY: f64 = 1.2e9;

/// Outcome of one check: `value` must not exceed `tolerance`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seconds: f64,
}

fn check(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Result<Check> {
    let start = Instant::now();
    let value = f()?;
    Ok(Check { name, value, tolerance, passed: value <= tolerance, seconds: start.elapsed().as_secs_f64() })
}

fn k0() -> Complex64 {
    wavenumber(&Material::VACUUM, FREQUENCY)
}

fn random_source(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

/// `⌈|k|·max(ρ, ρ′)⌉ + 20`.
pub fn addition_order(k: Complex64, rho: f64, rho_p: f64) -> usize {
    (k.norm() * rho.max(rho_p)).ceil() as usize + 20
}

/// An order past which the terms, decaying like `(ρ_</ρ_>)^n/n`, are below
/// `1e−12` of the leading ones.
pub fn addition_order_converged(k: Complex64, rho: f64, rho_p: f64) -> usize {
    let ratio = rho.min(rho_p) / rho.max(rho_p);
    let tail = if ratio > 0.0 { (1e-12f64.ln() / ratio.ln()).ceil() as usize } else { 0 };
    addition_order(k, rho, rho_p) + tail
}

/// Truncated `Σ_{|n|≤N} J_n(kρ_<)H_n(kρ_>)e^{jnψ}`.
pub fn addition_series(k: Complex64, rho: f64, rho_p: f64, psi: f64, nmax: usize) -> Result<Complex64> {
    let (lo, hi) = if rho < rho_p { (rho, rho_p) } else { (rho_p, rho) };
    let j = cyl_orders(CylKind::BesselJ, nmax, k * lo)?;
    let h = cyl_orders(CylKind::Hankel2, nmax, k * hi)?;
    let mut s = Complex64::new(0.0, 0.0);
    for n in 0..=nmax {
        let (a, b) = (j.scaled(n), h.scaled(n));
        let term = Scaled::new(a.mantissa * b.mantissa, a.log_scale + b.log_scale).value();
        // J_{−n}H_{−n} = J_nH_n, so the ±n pair is 2cos(nψ).
        s += if n == 0 { term } else { term * (2.0 * (n as f64 * psi).cos()) };
    }
    Ok(s)
}

fn addition_theorem() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = k0();
    let lambda = free_space_wavelength(FREQUENCY);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 200 {
        let rho = rng.random_range(0.0..30.0) / k.re;
        let rho_p = rng.random_range(0.0..30.0) / k.re;
        let psi = rng.random_range(0.0..TAU);
        if (rho - rho_p).abs() < 1e-3 * lambda {
            continue;
        }
        let d = (rho * rho + rho_p * rho_p - 2.0 * rho * rho_p * psi.cos()).sqrt();
        let exact = cyl_fn(CylKind::Hankel2, 0, k * d)?;
        let series = addition_series(k, rho, rho_p, psi, addition_order_converged(k, rho, rho_p))?;
        worst = worst.max((series - exact).norm() / exact.norm());
        done += 1;
    }
    Ok(worst)
}

fn ring_integrals_vs_quadrature() -> Result<f64> {
    let k = k0();
    let grid = PolarGrid::new(0.3 * free_space_wavelength(FREQUENCY), 8, 32)?;
    let t = RingIntegralTable::precompute(&grid, k)?;
    let tol = Tolerance { abs: 0.0, rel: 1e-12, max_intervals: 2000 };
    let quad = |kind: CylKind, n: usize, a: f64, b: f64| {
        integrate(|r| cyl_fn(kind, n as i32, k * r).map(|v| v * r).unwrap_or_default(), a, b, tol).value
    };
    let err = |v: Scaled, q: Complex64| (v.value() - q).norm() / q.norm();
    let mut worst: f64 = 0.0;
    for m in 0..grid.rings {
        let (lo, hi, mid) = (grid.edge(m), grid.edge(m + 1), grid.mid(m));
        for n in 0..=t.nmax {
            worst = worst.max(err(t.pj_full(m, n), quad(CylKind::BesselJ, n, lo, hi)));
            worst = worst.max(err(t.pj_half(m, n), quad(CylKind::BesselJ, n, lo, mid)));
            worst = worst.max(err(t.ph_half_u(m, n), quad(CylKind::Hankel2, n, mid, hi)));
            if let Some(v) = t.ph_full(m, n) {
                worst = worst.max(err(v, quad(CylKind::Hankel2, n, lo, hi)));
            }
        }
    }
    Ok(worst)
}

/// Direct summation of the outward/inward sums, term by term.
pub fn unrolled_sums(spec: &crate::polar::HarmonicField, t: &RingIntegralTable) -> (Vec<Complex64>, Vec<Complex64>) {
    let (rings, len) = (spec.rings, spec.angles);
    let pre = Complex64::new(0.0, -FRAC_PI_2);
    let mul = |a: Scaled, b: Scaled| Scaled::new(a.mantissa * b.mantissa, a.log_scale + b.log_scale).value();
    let mut out = vec![Complex64::new(0.0, 0.0); rings * len];
    let mut inn = vec![Complex64::new(0.0, 0.0); rings * len];
    for l in 0..rings {
        for b in 0..len {
            let n = harmonic_of_bin(b, len).unsigned_abs() as usize;
            let c = |m: usize| spec.data[m * len + b];
            let mut so = Complex64::new(0.0, 0.0);
            for m in 0..l {
                so += mul(t.h_mid(l, n), t.pj_full(m, n)) * c(m);
            }
            so += mul(t.h_mid(l, n), t.pj_half(l, n)) * c(l);
            let mut si = mul(t.j_mid(l, n), t.ph_half_u(l, n)) * c(l);
            for m in l + 1..rings {
                si += mul(t.j_mid(l, n), t.ph_full(m, n).expect("outer rings have finite integrals")) * c(m);
            }
            out[l * len + b] = pre * so;
            inn[l * len + b] = pre * si;
        }
    }
    (out, inn)
}

fn reassociation() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = PolarGrid::new(0.3 * free_space_wavelength(FREQUENCY), 8, 32)?;
    let t = RingIntegralTable::precompute(&grid, k0())?;
    let spec = angular_spectrum(&PolarField::from_vec(&grid, random_source(&mut rng, grid.len()))?);
    let (out, _) = accumulate_outward(&spec, &t);
    let inn = accumulate_inward(&spec, &t);
    let (ro, ri) = unrolled_sums(&spec, &t);
    Ok(relative_error(&ro, &out.data)?.max(relative_error(&ri, &inn.data)?))
}

fn polar_mvp() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let k = k0();
    let grid = PolarGrid::new(0.3 * free_space_wavelength(FREQUENCY), 12, 32)?;
    let op = PolarOperator::build(&grid, k)?;
    let src = random_source(&mut rng, grid.len());
    let mut a = vec![Complex64::new(0.0, 0.0); grid.len()];
    op.apply(&src, &mut a);
    let d = direct_quadrature_potential(CellSet::Polar(&grid), &src, k, &grid.points())?;
    relative_error(&d, &a)
}

fn cartesian_mvp() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let delta = free_space_wavelength(FREQUENCY) / 20.0;
    let grid = CartesianGrid::new(16, 16, delta, [0.0, 0.0])?;
    let kern = CartesianKernel::build(&grid, k0())?;
    let src = random_source(&mut rng, grid.len());
    let mut a = vec![Complex64::new(0.0, 0.0); grid.len()];
    kern.apply(&src, &mut a);
    relative_error(&kern.apply_direct(&src), &a)
}

fn exterior_field() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let k = k0();
    let grid = PolarGrid::new(0.3 * free_space_wavelength(FREQUENCY), 8, 16)?;
    let op = PolarOperator::build(&grid, k)?;
    let src = random_source(&mut rng, grid.len());
    let circle = ObservationCircle::new(3.0 * grid.radius, 32)?;
    let es = op.scattered_field(&src, circle.radius, &circle.angles())?;
    let d: Vec<Complex64> = direct_quadrature_potential(CellSet::Polar(&grid), &src, k, &circle.points())?
        .into_iter()
        .map(|v| v * k * k)
        .collect();
    relative_error(&d, &es)
}

fn solver_true_residual() -> Result<f64> {
    let k = k0();
    let grid = PolarGrid::new(0.1 * free_space_wavelength(FREQUENCY), 8, 16)?;
    let chi = PolarField::from_vec(&grid, vec![Complex64::new(0.1, 0.0); grid.len()])?;
    let op = ForwardOperator::polar(PolarOperator::build(&grid, k)?, chi)?;
    let rhs = op.incident();
    let rep = bcgs_solve(&op, &rhs, 1e-10, 200)?;
    let mut l = vec![Complex64::new(0.0, 0.0); rhs.len()];
    op.apply_l(&rep.field, &mut l);
    // A solve that did not converge fails outright.
    let r = relative_error(&rhs, &l)?;
    Ok(if rep.converged { r } else { f64::INFINITY })
}

fn zero_contrast() -> Result<f64> {
    let grid = PolarGrid::new(0.1, 4, 16)?;
    let op = ForwardOperator::polar(PolarOperator::build(&grid, k0())?, PolarField::zeros(&grid))?;
    let rep = bcgs_solve(&op, &op.incident(), 1e-4, 10)?;
    Ok(rep.iterations as f64 + rep.final_residual())
}

fn energy_identity() -> Result<f64> {
    let lambda = free_space_wavelength(FREQUENCY);
    let cyl = LayeredCylinder::new(
        vec![0.2 * lambda, 0.4 * lambda],
        vec![Material::new(1.5, 0.0), Material::new(3.0, 0.0)],
        Material::VACUUM,
    )?;
    let t = scattering_coefficients(&cyl, FREQUENCY, 30)?;
    Ok(t.iter().map(|tn| (tn.re + tn.norm_sqr()).abs()).fold(0.0, f64::max))
}

fn born_limit() -> Result<f64> {
    let lambda = free_space_wavelength(FREQUENCY);
    let k = k0();
    let chi = 1e-3;
    let cyl = LayeredCylinder::new(vec![0.2 * lambda], vec![Material::new(1.0 + chi, 0.0)], Material::VACUUM)?;
    let circle = ObservationCircle::new(0.6 * lambda, 16)?;
    let exact = analytic_scattered(&cyl, FREQUENCY, &circle)?;
    let grid = PolarGrid::new(0.2 * lambda, 16, 64)?;
    let src: Vec<Complex64> = incident_field(k, &grid.points()).into_iter().map(|v| v * chi).collect();
    let op = PolarOperator::build(&grid, k)?;
    let born = op.scattered_field(&src, circle.radius, &circle.angles())?;
    relative_error(&exact, &born)
}

fn counters() -> Result<f64> {
    let exact = count_mults_1d(64, 64) == 57_344 && count_mults_2d(64, 64) == 475_136.0;
    let grid = PolarGrid::new(0.1, 16, 64)?;
    let op = PolarOperator::build(&grid, k0())?;
    let src = vec![Complex64::new(1.0, 0.0); grid.len()];
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    op.apply(&src, &mut out);
    let ratio = op.counter.get() / count_mults_1d(16, 64) as f64;
    Ok(if exact { ratio } else { f64::INFINITY })
}

/// Runs every check in order.
pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![
        check("addition theorem, converged order (200 pairs)", 1e-8, addition_theorem)?,
        check("ring integrals vs quadrature (8x32)", 1e-8, ring_integrals_vs_quadrature)?,
        check("sweep reassociation (8x32)", 1e-12, reassociation)?,
        check("polar product vs direct quadrature (12x32)", 1e-3, polar_mvp)?,
        check("cartesian FFT vs direct sum (16x16)", 1e-12, cartesian_mvp)?,
        check("exterior field vs direct quadrature", 1e-2, exterior_field)?,
        check("zero contrast: iterations + residual", 0.0, zero_contrast)?,
        check("solver true residual (tol 1e-10)", 1e-10, solver_true_residual)?,
        check("layered cylinder energy identity", 1e-10, energy_identity)?,
        check("weak contrast matches Born limit", 5e-3, born_limit)?,
        check("empirical / modelled polar count", 2.0, counters)?,
    ])
}
