//! Independent references and the comparison metrics.

mod direct;
mod layered;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use direct::{direct_quadrature_potential, CellSet};
pub use layered::{analytic_scattered, scattering_coefficients, LayeredCylinder};

/// `‖reference − computed‖₂ / ‖reference‖₂`.
pub fn relative_error(reference: &[Complex64], computed: &[Complex64]) -> Result<f64> {
    if reference.len() != computed.len() {
        return Err(Error::domain(format!(
            "sample counts differ: {} reference vs {} computed",
            reference.len(),
            computed.len()
        )));
    }
    let den: f64 = reference.iter().map(|v| v.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::domain("reference field has zero norm"));
    }
    let num: f64 = reference.iter().zip(computed).map(|(r, c)| (r - c).norm_sqr()).sum();
    Ok((num / den).sqrt())
}

/// `G_eff = 4N₂·M_xN_y·log₂(4M_xN_y) / (N₁·M_ρN_φ·log₂N_φ)`.
pub fn efficiency_gain(iters_2d: f64, mx: f64, ny: f64, iters_1d: f64, rings: f64, angles: f64) -> f64 {
    4.0 * iters_2d * mx * ny * (4.0 * mx * ny).log2() / (iters_1d * rings * angles * angles.log2())
}
