//! Bi-CGSTAB on `L(E) = E − k_b²·A_z(χ ⊙ E) = E^i` with either backend.

use std::fmt;
use std::str::FromStr;
use web_time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cartesian::{count_mults_2d, CartesianKernel};
use crate::error::{Error, Result};
use crate::model::{incident_field, CartesianField, ObservationCircle, PolarField};
use crate::polar::{count_mults_1d, MultCounter, PolarOperator};

/// Which matrix-vector product a solve uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Polar,
    Cartesian,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Polar => "polar",
            Method::Cartesian => "cartesian",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(Method::Polar),
            "cartesian" => Ok(Method::Cartesian),
            _ => Err(Error::config(format!("unknown method `{s}` (expected polar or cartesian)"))),
        }
    }
}

#[derive(Debug)]
enum Backend {
    Polar(PolarOperator),
    Cartesian(CartesianKernel),
}

/// The discrete forward operator: a backend, the sampled contrast, and `k_b`.
#[derive(Debug)]
pub struct ForwardOperator {
    backend: Backend,
    chi: Vec<Complex64>,
    points: Vec<[f64; 2]>,
}

impl ForwardOperator {
    pub fn polar(op: PolarOperator, chi: PolarField) -> Result<Self> {
        let g = *op.grid();
        if chi.rings != g.rings || chi.angles != g.angles {
            return Err(Error::config("contrast field does not match the polar grid"));
        }
        Ok(Self { points: g.points(), backend: Backend::Polar(op), chi: chi.data })
    }

    pub fn cartesian(kernel: CartesianKernel, chi: CartesianField) -> Result<Self> {
        if chi.nx != kernel.grid.nx || chi.ny != kernel.grid.ny {
            return Err(Error::config("contrast field does not match the Cartesian grid"));
        }
        Ok(Self { points: kernel.grid.points(), backend: Backend::Cartesian(kernel), chi: chi.data })
    }

    pub fn method(&self) -> Method {
        match self.backend {
            Backend::Polar(_) => Method::Polar,
            Backend::Cartesian(_) => Method::Cartesian,
        }
    }

    pub fn k_b(&self) -> Complex64 {
        match &self.backend {
            Backend::Polar(op) => op.k_b(),
            Backend::Cartesian(k) => k.k_b(),
        }
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    pub fn chi(&self) -> &[Complex64] {
        &self.chi
    }

    /// Collocation points in storage order.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn incident(&self) -> Vec<Complex64> {
        incident_field(self.k_b(), &self.points)
    }

    pub fn counter(&self) -> &MultCounter {
        match &self.backend {
            Backend::Polar(op) => &op.counter,
            Backend::Cartesian(k) => &k.counter,
        }
    }

    /// Modelled complex multiplications per matrix-vector product.
    pub fn model_mults(&self) -> f64 {
        match &self.backend {
            Backend::Polar(op) => count_mults_1d(op.grid().rings as u64, op.grid().angles as u64) as f64,
            Backend::Cartesian(k) => count_mults_2d(k.grid.nx as u64, k.grid.ny as u64),
        }
    }

    pub fn precompute_seconds(&self) -> f64 {
        match &self.backend {
            Backend::Polar(op) => op.precompute_seconds,
            Backend::Cartesian(k) => k.precompute_seconds,
        }
    }

    /// Number of cells in the discretization.
    pub fn unit_cells(&self) -> usize {
        self.len()
    }

    /// `A_z` for an arbitrary source.
    pub fn apply_potential(&self, source: &[Complex64], out: &mut [Complex64]) {
        match &self.backend {
            Backend::Polar(op) => op.apply(source, out),
            Backend::Cartesian(k) => k.apply(source, out),
        }
    }

    /// `L(E) = E − k_b²·A_z(χ ⊙ E)`.
    pub fn apply_l(&self, e: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(e.len(), self.len());
        let src: Vec<Complex64> = e.iter().zip(&self.chi).map(|(a, c)| a * c).collect();
        match &self.backend {
            Backend::Polar(op) => op.apply_owned(src, out),
            Backend::Cartesian(k) => k.apply(&src, out),
        }
        let k2 = self.k_b() * self.k_b();
        for (o, a) in out.iter_mut().zip(e) {
            *o = a - k2 * *o;
        }
    }

    /// `E^s` on the circle from a total field `e`: the harmonic exterior
    /// expansion for the polar backend, direct summation for the Cartesian.
    pub fn scattered_on_circle(&self, e: &[Complex64], circle: &ObservationCircle) -> Result<Vec<Complex64>> {
        let src: Vec<Complex64> = e.iter().zip(&self.chi).map(|(a, c)| a * c).collect();
        match &self.backend {
            Backend::Polar(op) => op.scattered_field(&src, circle.radius, &circle.angles()),
            Backend::Cartesian(k) => {
                let g = &k.grid;
                let (x0, y0) = (g.origin[0], g.origin[1]);
                let (x1, y1) = (x0 + g.nx as f64 * g.delta, y0 + g.ny as f64 * g.delta);
                let points = circle.points();
                if points.iter().any(|p| p[0] > x0 && p[0] < x1 && p[1] > y0 && p[1] < y1) {
                    return Err(Error::domain("observation circle passes through the Cartesian grid"));
                }
                k.scattered_field(&src, &points)
            }
        }
    }
}

/// Outcome of one iterative solve. Non-convergence is a state, not an error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub unit_cells: usize,
    /// Bi-CGSTAB iterations (two matrix-vector products each).
    pub iterations: usize,
    pub matvecs: usize,
    pub restarts: usize,
    /// `‖L(E) − E^i‖₂/‖E^i‖₂` after each iteration, starting with the
    /// initial guess. The last entry is a recomputed true residual.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub tol: f64,
    pub wall_seconds: f64,
    pub precompute_seconds: f64,
    pub model_mults_per_matvec: f64,
    pub model_mults: f64,
    pub empirical_mults: f64,
    pub field: Vec<Complex64>,
    pub scattered: Option<Vec<Complex64>>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&f64::NAN)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub const TRUE_RESIDUAL_EVERY: usize = 25;
pub const MAX_RESTARTS: usize = 3;
const BREAKDOWN: f64 = 1e-30;

struct Krylov {
    r: Vec<Complex64>,
    r_hat: Vec<Complex64>,
    p: Vec<Complex64>,
    v: Vec<Complex64>,
    rho: Complex64,
    alpha: Complex64,
    omega: Complex64,
}

impl Krylov {
    fn start(r: Vec<Complex64>) -> Self {
        let n = r.len();
        let one = Complex64::new(1.0, 0.0);
        Self {
            r_hat: r.clone(),
            r,
            p: vec![Complex64::new(0.0, 0.0); n],
            v: vec![Complex64::new(0.0, 0.0); n],
            rho: one,
            alpha: one,
            omega: one,
        }
    }
}

/// Solves `L(E) = rhs` starting from `E = rhs`, stopping once the relative
/// residual is at most `tol` or after `max_iter` iterations.
pub fn bcgs_solve(op: &ForwardOperator, rhs: &[Complex64], tol: f64, max_iter: usize) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::config(format!("tolerance must be positive, got {tol}")));
    }
    if rhs.len() != op.len() {
        return Err(Error::config("right-hand side does not match the operator"));
    }
    if rhs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::numerical("right-hand side is not finite"));
    }
    op.counter().reset();
    let start = Instant::now();
    let n = rhs.len();
    let b_norm = norm(rhs);
    let mut matvecs = 0usize;
    let mut lx = vec![Complex64::new(0.0, 0.0); n];

    let mut x = rhs.to_vec();
    let true_residual = |x: &[Complex64], lx: &mut Vec<Complex64>, matvecs: &mut usize| -> Vec<Complex64> {
        op.apply_l(x, lx);
        *matvecs += 1;
        rhs.iter().zip(lx.iter()).map(|(b, l)| b - l).collect()
    };

    let mut residuals = Vec::new();
    let mut iterations = 0;
    let mut restarts = 0;
    let mut converged;

    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        residuals.push(0.0);
        converged = true;
    } else {
        let r0 = true_residual(&x, &mut lx, &mut matvecs);
        let rel0 = norm(&r0) / b_norm;
        residuals.push(rel0);
        converged = rel0 <= tol;
        let mut k = Krylov::start(r0);
        let mut t = vec![Complex64::new(0.0, 0.0); n];

        while !converged && iterations < max_iter {
            let rho_new = dot(&k.r_hat, &k.r);
            let breakdown = rho_new.norm() < BREAKDOWN * norm(&k.r_hat) * norm(&k.r);
            let mut ok = !breakdown;
            if ok {
                let beta = (rho_new / k.rho) * (k.alpha / k.omega);
                for i in 0..n {
                    k.p[i] = k.r[i] + beta * (k.p[i] - k.omega * k.v[i]);
                }
                op.apply_l(&k.p, &mut k.v);
                matvecs += 1;
                let den = dot(&k.r_hat, &k.v);
                ok = den.norm() >= BREAKDOWN * norm(&k.r_hat) * norm(&k.v) && den.norm() > 0.0;
                if ok {
                    k.rho = rho_new;
                    k.alpha = rho_new / den;
                    let s: Vec<Complex64> = k.r.iter().zip(&k.v).map(|(r, v)| r - k.alpha * v).collect();
                    op.apply_l(&s, &mut t);
                    matvecs += 1;
                    let tt = dot(&t, &t).re;
                    k.omega = if tt > 0.0 { dot(&t, &s) / tt } else { Complex64::new(0.0, 0.0) };
                    for i in 0..n {
                        x[i] += k.alpha * k.p[i] + k.omega * s[i];
                        k.r[i] = s[i] - k.omega * t[i];
                    }
                    iterations += 1;
                    if iterations % TRUE_RESIDUAL_EVERY == 0 {
                        k.r = true_residual(&x, &mut lx, &mut matvecs);
                    }
                    let mut rel = norm(&k.r) / b_norm;
                    if !rel.is_finite() {
                        return Err(Error::numerical("residual is not finite"));
                    }
                    if rel <= tol {
                        // Confirm with the true residual before stopping.
                        k.r = true_residual(&x, &mut lx, &mut matvecs);
                        rel = norm(&k.r) / b_norm;
                        converged = rel <= tol;
                    }
                    residuals.push(rel);
                    ok = k.omega.norm() > 0.0;
                }
            }
            if !ok && !converged {
                if restarts == MAX_RESTARTS {
                    break;
                }
                restarts += 1;
                k = Krylov::start(true_residual(&x, &mut lx, &mut matvecs));
            }
        }
        if !converged {
            // Report the true residual of the returned iterate.
            let r = true_residual(&x, &mut lx, &mut matvecs);
            let rel = norm(&r) / b_norm;
            if residuals.last() != Some(&rel) {
                residuals.push(rel);
            }
        }
    }

    let per = op.model_mults();
    Ok(SolveReport {
        method: op.method(),
        unit_cells: op.unit_cells(),
        iterations,
        matvecs,
        restarts,
        residuals,
        converged,
        tol,
        wall_seconds: start.elapsed().as_secs_f64(),
        precompute_seconds: op.precompute_seconds(),
        model_mults_per_matvec: per,
        model_mults: per * matvecs as f64,
        empirical_mults: op.counter().get(),
        field: x,
        scattered: None,
    })
}
