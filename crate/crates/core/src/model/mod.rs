//! Media, material maps, discretizations and scenarios.
//!
//! Time convention is `e^{jωt}`: lossy media have `Im(k) ≤ 0` and the
//! incident plane wave travelling along `+x` is `exp(−j k_b x)`.

mod grid;
mod scenario;
mod shapes;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use grid::{
    incident_field, sample_contrast_cartesian, sample_contrast_polar, CartesianField, CartesianGrid, ObservationCircle,
    PolarField, PolarGrid,
};
pub use scenario::{builtin_names, GridSettings, ObservationSettings, Resolved, Scenario, SolverSettings, Units};
pub use shapes::{Inclusion, MaterialMap, Shape};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const MU_0: f64 = 4.0e-7 * PI;
pub const EPSILON_0: f64 = 1.0 / (MU_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT);

/// Relative permittivity and conductivity (S/m) of a non-magnetic medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub eps_r: f64,
    #[serde(default)]
    pub sigma: f64,
}

impl Material {
    pub const VACUUM: Material = Material { eps_r: 1.0, sigma: 0.0 };

    pub fn new(eps_r: f64, sigma: f64) -> Self {
        Self { eps_r, sigma }
    }

    /// `k² = ω²μ₀ε₀ε_r − jωμ₀σ`.
    pub fn k_squared(&self, frequency: f64) -> Complex64 {
        let omega = 2.0 * PI * frequency;
        Complex64::new(omega * omega * MU_0 * EPSILON_0 * self.eps_r, -omega * MU_0 * self.sigma)
    }

    /// Principal square root of `k²`, so `Re(k) > 0` and `Im(k) ≤ 0`.
    pub fn wavenumber(&self, frequency: f64) -> Complex64 {
        self.k_squared(frequency).sqrt()
    }
}

impl Default for Material {
    fn default() -> Self {
        Material::VACUUM
    }
}

/// The background medium is just a material; the alias keeps signatures
/// readable.
pub type Background = Material;

pub fn wavenumber(bg: &Background, frequency: f64) -> Complex64 {
    bg.wavenumber(frequency)
}

pub fn free_space_wavelength(frequency: f64) -> f64 {
    SPEED_OF_LIGHT / frequency
}

/// `χ = k²/k_b² − 1` for a material embedded in the background.
pub fn contrast(material: &Material, bg: &Background, frequency: f64) -> Complex64 {
    material.k_squared(frequency) / bg.k_squared(frequency) - 1.0
}

/// Contrast at a point; zero outside every inclusion.
pub fn contrast_at(map: &MaterialMap, bg: &Background, frequency: f64, point: [f64; 2]) -> Complex64 {
    match map.material_at(point) {
        Some(m) => contrast(&m, bg, frequency),
        None => Complex64::new(0.0, 0.0),
    }
}

/// Largest admissible cell: `min(λ_min/10, δ/2)` with
/// `λ_min = (c/f)/√(ε_r^max)`.
pub fn max_cell_size(eps_r_max: f64, frequency: f64, feature: f64) -> f64 {
    let lambda_min = free_space_wavelength(frequency) / eps_r_max.max(1.0).sqrt();
    (lambda_min / 10.0).min(0.5 * feature)
}
