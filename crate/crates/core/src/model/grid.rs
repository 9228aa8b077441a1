use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{contrast_at, Background, MaterialMap};
use crate::error::{Error, Result};

/// Uniform rings `ρ_L = L·Δ`, `L = 0…M`, times `N_φ` angular cells centred at
/// `φ_k = (k + ½)·2π/N_φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGrid {
    pub radius: f64,
    pub rings: usize,
    pub angles: usize,
}

impl PolarGrid {
    pub fn new(radius: f64, rings: usize, angles: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::config(format!("polar radius must be positive, got {radius}")));
        }
        if rings == 0 {
            return Err(Error::config("polar grid needs at least one ring"));
        }
        if angles < 2 || !angles.is_power_of_two() {
            return Err(Error::config(format!("angular sample count must be a power of two ≥ 2, got {angles}")));
        }
        Ok(Self { radius, rings, angles })
    }

    /// Smallest power of two `≥ max(2⌈|k_b|·a·√ε_max⌉ + 16, 2πa/Δ)`.
    pub fn auto_angles(radius: f64, delta: f64, k_b: Complex64, eps_r_max: f64) -> usize {
        let harmonics = 2.0 * (k_b.norm() * radius * eps_r_max.max(1.0).sqrt()).ceil() + 16.0;
        let arc = TAU * radius / delta;
        (harmonics.max(arc).ceil() as usize).next_power_of_two()
    }

    pub fn delta(&self) -> f64 {
        self.radius / self.rings as f64
    }

    /// Ring edge `ρ_L`, `L = 0…M`.
    pub fn edge(&self, l: usize) -> f64 {
        if l == self.rings {
            self.radius
        } else {
            l as f64 * self.delta()
        }
    }

    /// Midpoint of ring `m` (0-based), `(m + ½)Δ`.
    pub fn mid(&self, m: usize) -> f64 {
        (m as f64 + 0.5) * self.delta()
    }

    pub fn phi(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * TAU / self.angles as f64
    }

    pub fn len(&self) -> usize {
        self.rings * self.angles
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell-centre coordinates in storage order (ring-major).
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for m in 0..self.rings {
            let r = self.mid(m);
            for k in 0..self.angles {
                let p = self.phi(k);
                out.push([r * p.cos(), r * p.sin()]);
            }
        }
        out
    }

    /// Area of the pulse cell in ring `m`: `ρ_{m+½}·Δ·2π/N_φ`, which also
    /// equals the exact annular-sector area.
    pub fn cell_area(&self, m: usize) -> f64 {
        self.mid(m) * self.delta() * TAU / self.angles as f64
    }
}

/// `M_x × N_y` square cells of side `Δ` with lower-left corner `origin`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianGrid {
    pub nx: usize,
    pub ny: usize,
    pub delta: f64,
    pub origin: [f64; 2],
}

impl CartesianGrid {
    pub fn new(nx: usize, ny: usize, delta: f64, origin: [f64; 2]) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::config("Cartesian grid needs at least one cell per axis"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::config(format!("cell size must be positive, got {delta}")));
        }
        Ok(Self { nx, ny, delta, origin })
    }

    /// Smallest grid of cell `delta` centred on the box `[xmin, ymin, xmax, ymax]`.
    pub fn covering(bbox: [f64; 4], delta: f64) -> Result<Self> {
        let w = bbox[2] - bbox[0];
        let h = bbox[3] - bbox[1];
        // A hair of slack so an exact multiple does not round up a cell.
        let nx = ((w / delta) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((h / delta) - 1e-9).ceil().max(1.0) as usize;
        let cx = 0.5 * (bbox[0] + bbox[2]);
        let cy = 0.5 * (bbox[1] + bbox[3]);
        let origin = [cx - 0.5 * nx as f64 * delta, cy - 0.5 * ny as f64 * delta];
        Self::new(nx, ny, delta, origin)
    }

    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + (i as f64 + 0.5) * self.delta, self.origin[1] + (j as f64 + 0.5) * self.delta]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell centres in storage order (`i` major, index `i·N_y + j`).
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nx {
            for j in 0..self.ny {
                out.push(self.center(i, j));
            }
        }
        out
    }

    pub fn cell_area(&self) -> f64 {
        self.delta * self.delta
    }
}

/// Observation points `r(cos φ_j, sin φ_j)` with `φ_j = j·2π/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservationCircle {
    pub radius: f64,
    pub samples: usize,
}

impl ObservationCircle {
    pub fn new(radius: f64, samples: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || samples == 0 {
            return Err(Error::config("observation circle needs a positive radius and at least one sample"));
        }
        Ok(Self { radius, samples })
    }

    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * TAU / self.samples as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.angle(j)).collect()
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        self.angles().into_iter().map(|a| [self.radius * a.cos(), self.radius * a.sin()]).collect()
    }
}

/// Complex samples on a polar grid, ring-major: `data[m·N_φ + k]` is the
/// value at `(ρ_{m+½}, φ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarField {
    pub rings: usize,
    pub angles: usize,
    pub data: Vec<Complex64>,
}

impl PolarField {
    pub fn zeros(grid: &PolarGrid) -> Self {
        Self { rings: grid.rings, angles: grid.angles, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_vec(grid: &PolarGrid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::config(format!("field has {} samples, grid has {}", data.len(), grid.len())));
        }
        Ok(Self { rings: grid.rings, angles: grid.angles, data })
    }

    pub fn ring(&self, m: usize) -> &[Complex64] {
        &self.data[m * self.angles..(m + 1) * self.angles]
    }

    pub fn at(&self, m: usize, k: usize) -> Complex64 {
        self.data[m * self.angles + k]
    }
}

/// Complex samples on a Cartesian grid, `data[i·N_y + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianField {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<Complex64>,
}

impl CartesianField {
    pub fn zeros(grid: &CartesianGrid) -> Self {
        Self { nx: grid.nx, ny: grid.ny, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_vec(grid: &CartesianGrid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::config(format!("field has {} samples, grid has {}", data.len(), grid.len())));
        }
        Ok(Self { nx: grid.nx, ny: grid.ny, data })
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.ny + j]
    }
}

/// `exp(−j k_b x)` at each point.
pub fn incident_field(k_b: Complex64, points: &[[f64; 2]]) -> Vec<Complex64> {
    points.iter().map(|p| (-Complex64::i() * k_b * p[0]).exp()).collect()
}

const SUPPORT_SLACK: f64 = 1e-9;

/// `χ` at every polar cell centre. Fails if the object reaches outside the
/// embedding disk.
pub fn sample_contrast_polar(map: &MaterialMap, grid: &PolarGrid, bg: &Background, frequency: f64) -> Result<PolarField> {
    let extent = map.extent_radius();
    if extent > grid.radius * (1.0 + SUPPORT_SLACK) {
        return Err(Error::config(format!(
            "object extends to radius {extent:.6} m beyond the embedding disk of radius {:.6} m",
            grid.radius
        )));
    }
    let data = grid.points().into_iter().map(|p| contrast_at(map, bg, frequency, p)).collect();
    PolarField::from_vec(grid, data)
}

/// `χ` at every Cartesian cell centre. Fails if the object's bounding box is
/// not covered by the grid.
pub fn sample_contrast_cartesian(
    map: &MaterialMap,
    grid: &CartesianGrid,
    bg: &Background,
    frequency: f64,
) -> Result<CartesianField> {
    if let Some(b) = map.bounding_box() {
        let x1 = grid.origin[0] + grid.nx as f64 * grid.delta;
        let y1 = grid.origin[1] + grid.ny as f64 * grid.delta;
        let tol = SUPPORT_SLACK * grid.delta.max(x1 - grid.origin[0]);
        if b[0] < grid.origin[0] - tol || b[1] < grid.origin[1] - tol || b[2] > x1 + tol || b[3] > y1 + tol {
            return Err(Error::config("object extends beyond the Cartesian grid"));
        }
    }
    let data = grid.points().into_iter().map(|p| contrast_at(map, bg, frequency, p)).collect();
    CartesianField::from_vec(grid, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Inclusion, Material};

    #[test]
    fn auto_angles_is_power_of_two() {
        let n = PolarGrid::auto_angles(0.1, 0.0125, Complex64::new(25.15, 0.0), 3.0);
        assert!(n.is_power_of_two());
        assert!(n as f64 >= std::f64::consts::TAU * 0.1 / 0.0125);
        assert_eq!(n, 64);
    }

    #[test]
    fn grid_geometry() {
        let g = PolarGrid::new(1.0, 4, 8).unwrap();
        assert_eq!(g.edge(0), 0.0);
        assert_eq!(g.edge(4), 1.0);
        assert!((g.mid(0) - 0.125).abs() < 1e-15);
        let total: f64 = (0..4).map(|m| g.cell_area(m) * 8.0).sum();
        assert!((total - std::f64::consts::PI).abs() < 1e-12);
        assert!(PolarGrid::new(1.0, 4, 12).is_err());
    }

    #[test]
    fn incident_phase() {
        let k = Complex64::new(2.0 * std::f64::consts::PI, 0.0);
        let v = incident_field(k, &[[0.0, 0.0], [0.5, 3.0]]);
        assert!((v[0] - 1.0).norm() < 1e-15);
        assert!((v[1] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn object_outside_disk_is_rejected() {
        let map = MaterialMap::new(vec![Inclusion::circle([0.0, 0.0], 1.5, Material::new(2.0, 0.0))]);
        let g = PolarGrid::new(1.0, 4, 8).unwrap();
        assert!(matches!(sample_contrast_polar(&map, &g, &Material::VACUUM, 1e9), Err(Error::Config(_))));
    }

    #[test]
    fn covering_grid_contains_box() {
        let g = CartesianGrid::covering([-0.1, -0.1, 0.1, 0.1], 0.0125).unwrap();
        assert_eq!((g.nx, g.ny), (16, 16));
        assert!((g.origin[0] + 0.1).abs() < 1e-15);
    }
}
