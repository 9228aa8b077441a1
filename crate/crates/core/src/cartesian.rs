//! The conventional baseline: pulse basis on square cells, point matching at
//! the cell centres, and the convolution evaluated with a zero-padded 2-D FFT.
//!
//! Each cell is replaced by the circular cell of equal area, radius
//! `a = Δ/√π`, over which the Green's function integrates in closed form:
//!
//! - self cell: `(−jπa/(2k_b))·H_1^(2)(k_ba) − 1/k_b²`
//! - other cells at centre distance `ρ`: `(−jπa/(2k_b))·J_1(k_ba)·H_0^(2)(k_bρ)`
//!
//! Both are checked against adaptive quadrature when a kernel is built.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use web_time::Instant;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{CartesianField, CartesianGrid};
use crate::polar::MultCounter;
use crate::quad::{integrate_2d, Tolerance};
use crate::specfun::{cyl_fn, CylKind};

const SELF_CHECK_TOL: f64 = 1e-6;

/// Modelled complex multiplications of one Cartesian matrix-vector product,
/// `8M_xN_y·log₂(4M_xN_y) + 4M_xN_y`. Integral whenever `M_xN_y` is a power
/// of two.
pub fn count_mults_2d(mx: u64, ny: u64) -> f64 {
    let cells = (mx * ny) as f64;
    8.0 * cells * (4.0 * cells).log2() + 4.0 * cells
}

/// `(n/2)·log₂n` rounded to the nearest half unit, in half units.
fn fft_half_units(n: usize) -> u64 {
    (n as f64 * (n as f64).log2()).round() as u64
}

/// Closed-form integrals of `(−j/4)H_0^(2)` over an equivalent circular cell.
#[derive(Clone, Copy, Debug)]
pub struct EquivalentCell {
    pub k_b: Complex64,
    pub a_eq: f64,
    self_term: Complex64,
    off_factor: Complex64,
}

impl EquivalentCell {
    pub fn new(delta: f64, k_b: Complex64) -> Result<Self> {
        let a = delta / PI.sqrt();
        let x = k_b * a;
        let pre = Complex64::new(0.0, -PI * a / 2.0) / k_b;
        let h1 = cyl_fn(CylKind::Hankel2, 1, x)?;
        let j1 = cyl_fn(CylKind::BesselJ, 1, x)?;
        Ok(Self { k_b, a_eq: a, self_term: pre * h1 - 1.0 / (k_b * k_b), off_factor: pre * j1 })
    }

    /// Integral seen at distance `rho` from the cell centre; `rho` must be 0
    /// or outside the circle.
    pub fn entry(&self, rho: f64) -> Complex64 {
        if rho == 0.0 {
            self.self_term
        } else {
            debug_assert!(rho >= self.a_eq);
            self.off_factor * cyl_fn(CylKind::Hankel2, 0, self.k_b * rho).expect("finite nonzero argument")
        }
    }

    /// Adaptive quadrature of the same integral, in polar coordinates about
    /// the cell centre.
    pub fn quadrature(&self, rho: f64) -> Complex64 {
        let tol = Tolerance { abs: 1e-16, rel: 1e-10, max_intervals: 2000 };
        let k = self.k_b;
        integrate_2d(
            |r, t| {
                let d = (r * t.cos() - rho).hypot(r * t.sin());
                if d == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let h0 = cyl_fn(CylKind::Hankel2, 0, k * d).expect("finite nonzero argument");
                Complex64::new(0.0, -0.25) * h0 * r
            },
            0.0,
            self.a_eq,
            |_| 0.0,
            |_| TAU,
            tol,
        )
        .value
    }

    /// Compares the closed forms to quadrature at the self cell and two
    /// neighbours.
    pub fn self_check(&self, delta: f64) -> Result<()> {
        for rho in [0.0, delta, delta * 2f64.sqrt()] {
            let closed = self.entry(rho);
            let quad = self.quadrature(rho);
            let err = (closed - quad).norm() / quad.norm();
            if !(err <= SELF_CHECK_TOL) {
                return Err(Error::numerical(format!(
                    "equivalent-cell closed form disagrees with quadrature at ρ = {rho:e}: relative error {err:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Row-major `rows × cols` complex 2-D transform by row passes, a transpose,
/// and column passes. The spectrum is left transposed (`cols × rows`).
#[derive(Clone)]
struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("rows", &self.rows).field("cols", &self.cols).finish()
    }
}

fn run(fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
    let len = fft.len();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let per_task = len * (4096 / len).max(1);
        buf.par_chunks_mut(per_task).for_each(|chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = len;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(buf, &mut scratch);
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

impl Fft2 {
    fn new(rows: usize, cols: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: p.plan_fft_forward(cols),
            row_inv: p.plan_fft_inverse(cols),
            col_fwd: p.plan_fft_forward(rows),
            col_inv: p.plan_fft_inverse(rows),
        }
    }

    fn forward(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        run(&self.row_fwd, &mut buf);
        let mut t = transpose(&buf, self.rows, self.cols);
        run(&self.col_fwd, &mut t);
        t
    }

    /// Unnormalized inverse of [`Fft2::forward`].
    fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<Complex64> {
        run(&self.col_inv, &mut spec);
        let mut buf = transpose(&spec, self.cols, self.rows);
        run(&self.row_inv, &mut buf);
        buf
    }

    fn half_units(&self) -> u64 {
        self.rows as u64 * fft_half_units(self.cols) + self.cols as u64 * fft_half_units(self.rows)
    }
}

/// Circulant-embedded Green samples and their spectrum for one grid.
#[derive(Debug)]
pub struct CartesianKernel {
    pub grid: CartesianGrid,
    pub cell: EquivalentCell,
    /// Padded extent `(P, Q)`, at least `(2M_x − 1, 2N_y − 1)`.
    pub padded: [usize; 2],
    /// Green samples, row-major `P × Q`, negative offsets wrapped.
    pub green: Vec<Complex64>,
    spectrum: Vec<Complex64>,
    fft: Fft2,
    pub counter: MultCounter,
    pub precompute_seconds: f64,
}

impl CartesianKernel {
    /// Kernel on the standard `2M_x × 2N_y` padding.
    pub fn build(grid: &CartesianGrid, k_b: Complex64) -> Result<Self> {
        Self::build_padded(grid, k_b, [2 * grid.nx, 2 * grid.ny])
    }

    pub fn build_padded(grid: &CartesianGrid, k_b: Complex64, padded: [usize; 2]) -> Result<Self> {
        let start = Instant::now();
        let [p, q] = padded;
        if p + 1 < 2 * grid.nx || q + 1 < 2 * grid.ny {
            return Err(Error::config(format!(
                "padding {p}×{q} is too small for a {}×{} grid",
                grid.nx, grid.ny
            )));
        }
        let cell = EquivalentCell::new(grid.delta, k_b)?;
        cell.self_check(grid.delta)?;

        let (mx, ny) = (grid.nx as i64, grid.ny as i64);
        let mut green = vec![Complex64::new(0.0, 0.0); p * q];
        for di in -(mx - 1)..mx {
            for dj in -(ny - 1)..ny {
                let rho = grid.delta * (di as f64).hypot(dj as f64);
                let r = di.rem_euclid(p as i64) as usize;
                let c = dj.rem_euclid(q as i64) as usize;
                green[r * q + c] = cell.entry(rho);
            }
        }
        let fft = Fft2::new(p, q);
        let spectrum = fft.forward(green.clone());
        Ok(Self {
            grid: *grid,
            cell,
            padded,
            green,
            spectrum,
            fft,
            counter: MultCounter::default(),
            precompute_seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn k_b(&self) -> Complex64 {
        self.cell.k_b
    }

    /// Green entry for cell offset `(di, dj)`.
    pub fn entry(&self, di: i64, dj: i64) -> Complex64 {
        self.cell.entry(self.grid.delta * (di as f64).hypot(dj as f64))
    }

    /// `A_z` at the cell centres for source samples `φ = χE` in grid storage
    /// order (`i·N_y + j`).
    pub fn apply(&self, source: &[Complex64], out: &mut [Complex64]) {
        let (mx, ny) = (self.grid.nx, self.grid.ny);
        let [p, q] = self.padded;
        assert_eq!(source.len(), mx * ny);
        assert_eq!(out.len(), mx * ny);
        let mut buf = vec![Complex64::new(0.0, 0.0); p * q];
        for i in 0..mx {
            buf[i * q..i * q + ny].copy_from_slice(&source[i * ny..(i + 1) * ny]);
        }
        let mut spec = self.fft.forward(buf);
        for (s, g) in spec.iter_mut().zip(&self.spectrum) {
            *s *= g;
        }
        let buf = self.fft.inverse(spec);
        let inv = 1.0 / (p * q) as f64;
        for i in 0..mx {
            for j in 0..ny {
                out[i * ny + j] = buf[i * q + j] * inv;
            }
        }
        self.counter.add_real(2 * self.fft.half_units());
        self.counter.add_complex((p * q) as u64);
    }

    pub fn apply_potential_2d(&self, source: &CartesianField) -> CartesianField {
        let mut out = CartesianField::zeros(&self.grid);
        self.apply(&source.data, &mut out.data);
        out
    }

    /// Dense `O(N²)` evaluation of the same convolution.
    pub fn apply_direct(&self, source: &[Complex64]) -> Vec<Complex64> {
        let (mx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = vec![Complex64::new(0.0, 0.0); mx * ny];
        for i in 0..mx {
            for j in 0..ny {
                let mut s = Complex64::new(0.0, 0.0);
                for a in 0..mx {
                    for b in 0..ny {
                        s += self.entry(i as i64 - a as i64, j as i64 - b as i64) * source[a * ny + b];
                    }
                }
                out[i * ny + j] = s;
            }
        }
        out
    }

    /// Scattered field `k_b²·A_z` at points outside every equivalent cell,
    /// by direct summation over the cells.
    pub fn scattered_field(&self, source: &[Complex64], points: &[[f64; 2]]) -> Result<Vec<Complex64>> {
        let centres = self.grid.points();
        let k2 = self.cell.k_b * self.cell.k_b;
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            let mut s = Complex64::new(0.0, 0.0);
            for (c, v) in centres.iter().zip(source) {
                let rho = (p[0] - c[0]).hypot(p[1] - c[1]);
                if rho < self.cell.a_eq {
                    return Err(Error::domain("observation point lies inside the Cartesian grid"));
                }
                if v.norm() != 0.0 {
                    s += self.cell.entry(rho) * v;
                }
            }
            out.push(s * k2);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> Complex64 {
        Complex64::new(25.15, 0.0)
    }

    #[test]
    fn model_counts() {
        assert_eq!(count_mults_2d(64, 64), 475_136.0);
        assert_eq!(count_mults_2d(1, 1), 20.0);
    }

    #[test]
    fn far_cell_approaches_point_sample() {
        // The two differ by 2J_1(x)/x ≈ 1 − x²/8 with x = k_b·a.
        let delta = 0.005;
        let cell = EquivalentCell::new(delta, k()).unwrap();
        let rho = 200.0 * delta;
        let point = Complex64::new(0.0, -0.25) * cyl_fn(CylKind::Hankel2, 0, k() * rho).unwrap() * delta * delta;
        assert!((cell.entry(rho) - point).norm() / point.norm() < 1e-3);
    }

    #[test]
    fn impulse_gives_translated_kernel() {
        let g = CartesianGrid::new(6, 5, 0.01, [0.0, 0.0]).unwrap();
        let kern = CartesianKernel::build(&g, k()).unwrap();
        let mut src = vec![Complex64::new(0.0, 0.0); g.len()];
        src[2 * 5 + 3] = Complex64::new(1.0, 0.0);
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        kern.apply(&src, &mut out);
        for i in 0..6 {
            for j in 0..5 {
                let want = kern.entry(i as i64 - 2, j as i64 - 3);
                assert!((out[i * 5 + j] - want).norm() < 1e-12 * want.norm());
            }
        }
    }

    #[test]
    fn short_padding_rejected() {
        let g = CartesianGrid::new(4, 4, 0.01, [0.0, 0.0]).unwrap();
        assert!(matches!(CartesianKernel::build_padded(&g, k(), [6, 8]), Err(Error::Config(_))));
    }
}
