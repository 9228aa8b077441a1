//! Exact TM scattering from a concentric layered cylinder.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Background, Material, ObservationCircle};
use crate::specfun::{cyl_orders, CylKind};

/// Concentric layers about the origin; layer `i` fills
/// `radii[i−1] < ρ ≤ radii[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredCylinder {
    pub radii: Vec<f64>,
    pub layers: Vec<Material>,
    pub background: Background,
}

impl LayeredCylinder {
    pub fn new(radii: Vec<f64>, layers: Vec<Material>, background: Background) -> Result<Self> {
        if radii.is_empty() || radii.len() != layers.len() {
            return Err(Error::config("layered cylinder needs one material per radius"));
        }
        if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("layer radii must be positive and strictly increasing"));
        }
        Ok(Self { radii, layers, background })
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().expect("at least one layer")
    }
}

/// `(G_n, G_n′)` at `z` for `n = 0..=nmax` (derivative with respect to the
/// argument).
fn with_derivative(kind: CylKind, nmax: usize, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let o = cyl_orders(kind, nmax + 1, z)?;
    let v: Vec<Complex64> = (0..=nmax + 1).map(|n| o.value(n)).collect();
    let d = (0..=nmax)
        .map(|n| {
            // G_n′ = G_{n−1} − (n/z)G_n, and G_{−1} = −G_1.
            if n == 0 {
                -v[1]
            } else {
                v[n - 1] - v[n] * (n as f64) / z
            }
        })
        .collect();
    Ok((v[..=nmax].to_vec(), d))
}

/// Scattering coefficients `T_n`, `n = 0..=nmax`, such that
/// `E^s = Σ_n j^{−n} T_{|n|} H_n^(2)(k_bρ) e^{jnφ}` for the unit plane wave
/// `exp(−j k_b x)`.
pub fn scattering_coefficients(cyl: &LayeredCylinder, frequency: f64, nmax: usize) -> Result<Vec<Complex64>> {
    let ks: Vec<Complex64> = cyl.layers.iter().map(|m| m.wavenumber(frequency)).collect();
    let k_b = cyl.background.wavenumber(frequency);

    // (u, u′) per order: the field and its radial derivative, up to a common
    // factor, propagated from the core outward.
    let (j0, dj0) = with_derivative(CylKind::BesselJ, nmax, ks[0] * cyl.radii[0])?;
    let mut u: Vec<Complex64> = j0;
    let mut du: Vec<Complex64> = dj0.iter().map(|d| d * ks[0]).collect();

    for i in 1..cyl.radii.len() {
        let (k, r_in, r_out) = (ks[i], cyl.radii[i - 1], cyl.radii[i]);
        let x_in = k * r_in;
        let (jv, jd) = with_derivative(CylKind::BesselJ, nmax, x_in)?;
        let (hv, hd) = with_derivative(CylKind::Hankel2, nmax, x_in)?;
        let (jo, jod) = with_derivative(CylKind::BesselJ, nmax, k * r_out)?;
        let (ho, hod) = with_derivative(CylKind::Hankel2, nmax, k * r_out)?;
        for n in 0..=nmax {
            // Layer field a·J_n + b·H_n (J/H pair: Wronskian −2j/(πx)).
            let w = Complex64::new(0.0, -2.0) / (std::f64::consts::PI * x_in);
            let det = k * w;
            let a = (u[n] * k * hd[n] - du[n] * hv[n]) / det;
            let b = (du[n] * jv[n] - u[n] * k * jd[n]) / det;
            let nu = a * jo[n] + b * ho[n];
            let ndu = k * (a * jod[n] + b * hod[n]);
            let scale = nu.norm().max(ndu.norm() / k.norm());
            u[n] = nu / scale;
            du[n] = ndu / scale;
        }
    }

    let r = cyl.outer_radius();
    let (jb, jbd) = with_derivative(CylKind::BesselJ, nmax, k_b * r)?;
    let (hb, hbd) = with_derivative(CylKind::Hankel2, nmax, k_b * r)?;
    Ok((0..=nmax)
        .map(|n| -(jb[n] * du[n] - k_b * jbd[n] * u[n]) / (hb[n] * du[n] - k_b * hbd[n] * u[n]))
        .collect())
}

fn j_pow_neg(n: i64) -> Complex64 {
    // j^{−n}
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn series(cyl: &LayeredCylinder, frequency: f64, circle: &ObservationCircle, nmax: usize) -> Result<(Vec<Complex64>, f64)> {
    let k_b = cyl.background.wavenumber(frequency);
    let t = scattering_coefficients(cyl, frequency, nmax)?;
    let h = cyl_orders(CylKind::Hankel2, nmax, k_b * circle.radius)?;
    let terms: Vec<Complex64> = (0..=nmax).map(|n| t[n] * h.value(n)).collect();
    let tail = terms[nmax].norm().max(terms[nmax.saturating_sub(1)].norm());
    let peak = terms.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let field = circle
        .angles()
        .into_iter()
        .map(|phi| {
            let mut s = terms[0];
            for (n, term) in terms.iter().enumerate().skip(1) {
                // ±n pair: H_{−n} = (−1)^n H_n turns j^{n}e^{−jnφ} into j^{−n}e^{−jnφ}.
                s += term * j_pow_neg(n as i64) * (2.0 * (n as f64 * phi).cos());
            }
            s
        })
        .collect();
    Ok((field, if peak > 0.0 { tail / peak } else { 0.0 }))
}

/// Scattered field of the layered cylinder on the observation circle.
///
/// The series is truncated at `N = ⌈max|k|·r_out⌉ + 20`; if the last terms
/// are not below `1e−12` of the largest, `N` is doubled once before giving up.
pub fn analytic_scattered(cyl: &LayeredCylinder, frequency: f64, circle: &ObservationCircle) -> Result<Vec<Complex64>> {
    if circle.radius < cyl.outer_radius() {
        return Err(Error::domain("observation circle must enclose the cylinder"));
    }
    let kmax = cyl
        .layers
        .iter()
        .chain(std::iter::once(&cyl.background))
        .map(|m| m.wavenumber(frequency).norm())
        .fold(0.0, f64::max);
    let mut nmax = (kmax * cyl.outer_radius()).ceil() as usize + 20;
    for _ in 0..2 {
        let (field, tail) = series(cyl, frequency, circle, nmax)?;
        if tail < 1e-12 {
            return Ok(field);
        }
        nmax *= 2;
    }
    Err(Error::numerical("layered-cylinder series did not converge"))
}
