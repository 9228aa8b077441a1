use std::f64::consts::FRAC_PI_2;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;

use super::spectrum::{half_cell_phase, harmonic_of_bin, synthesize, HarmonicField, RingFft};
use super::table::{pulse_weight, RingIntegralTable};
use crate::error::{Error, Result};
use crate::model::{PolarField, PolarGrid};
use crate::specfun::{cyl_orders, CylKind};

/// Multiplication tally in half units: a complex×complex product counts 1,
/// a real×complex product ½.
#[derive(Debug, Default)]
pub struct MultCounter {
    half_units: AtomicU64,
}

impl MultCounter {
    pub fn add_complex(&self, n: u64) {
        self.half_units.fetch_add(2 * n, Ordering::Relaxed);
    }

    pub fn add_real(&self, n: u64) {
        self.half_units.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> f64 {
        self.half_units.load(Ordering::Relaxed) as f64 / 2.0
    }

    pub fn reset(&self) {
        self.half_units.store(0, Ordering::Relaxed);
    }
}

/// Modelled complex multiplications of one polar matrix-vector product:
/// `2M_ρN_φ·log₂N_φ + 2M_ρN_φ`.
pub fn count_mults_1d(rings: u64, angles: u64) -> u64 {
    let log2 = angles.trailing_zeros() as u64;
    2 * rings * angles * log2 + 2 * rings * angles
}

/// Radix-2 butterfly count of one length-`n` transform, `(n/2)·log₂n`.
pub fn fft_mults(n: u64) -> u64 {
    n / 2 * n.trailing_zeros() as u64
}

/// Per-ring, per-`|n|` sweep coefficients, kept together so each step
/// touches one cache line or two.
#[derive(Clone, Copy, Debug, Default)]
struct Coef {
    pj_half: Complex64,
    pj_full: Complex64,
    /// `scale · w_n · Ĥ_n(k_bμ_m)`.
    h_mid: Complex64,
    ph_half_u: Complex64,
    ph_full: Complex64,
    /// `scale · w_n · Ĵ_n(k_bμ_m)`.
    j_mid: Complex64,
    lower_mid: f64,
    upper_mid: f64,
    edge: f64,
}

/// The table with the propagation factors and pulse weights folded in, so
/// each sweep step is a handful of fused multiply-adds. Everything depends
/// on `|n|` only, so rows hold `N_φ/2 + 1` entries and bins look theirs up
/// in mirrored order.
#[derive(Clone, Debug)]
struct Sweep {
    rings: usize,
    angles: usize,
    cols: usize,
    /// Pulse weight per `|n|`.
    weights: Vec<f64>,
    coef: Vec<Coef>,
    band: usize,
    /// `scale · X_n(l, l+s)`, `[(l·(2B+1) + s+B)·cols + |n|]`. The `s = 0`
    /// entries are folded into `pj_half` and stored as zero.
    images: Vec<Complex64>,
}

impl Sweep {
    /// With `pulse`, harmonics carry the pulse weight and the alias images
    /// join the sweep; otherwise it is the plain sampled-spectrum recursion.
    fn new(t: &RingIntegralTable, scale: Complex64, pulse: bool) -> Self {
        let (rings, angles, cols) = (t.grid.rings, t.grid.angles, t.nmax + 1);
        let weights: Vec<f64> =
            (0..cols).map(|n| if pulse { pulse_weight(n as i64, angles) } else { 1.0 }).collect();
        let width = 2 * t.image_band + 1;
        let mut images: Vec<Complex64> = if pulse { t.images.iter().map(|x| x * scale).collect() } else { Vec::new() };
        let mut coef = Vec::with_capacity(rings * cols);
        for m in 0..rings {
            for n in 0..cols {
                let i = m * cols + n;
                let sw = scale * weights[n];
                let mut k = Coef {
                    pj_half: t.pj_half[i],
                    pj_full: t.pj_full[i],
                    h_mid: t.h_mid[i] * sw,
                    ph_half_u: t.ph_half_u[i],
                    ph_full: t.ph_full[i],
                    j_mid: t.j_mid[i] * sw,
                    lower_mid: t.lower_mid_ratio[i],
                    upper_mid: t.upper_mid_ratio[i],
                    edge: t.edge_ratio[i],
                };
                if pulse {
                    // h·(pj + X/h) = h·pj + X: the ring's own images ride
                    // along with its half-ring term.
                    let d = &mut images[(m * width + t.image_band) * cols + n];
                    k.pj_half += *d / k.h_mid;
                    *d = Complex64::new(0.0, 0.0);
                }
                coef.push(k);
            }
        }
        Self {
            rings,
            angles,
            cols,
            weights,
            coef,
            band: if pulse { t.image_band } else { 0 },
            images,
        }
    }

    /// Row entries in bin order: `|n|` runs `0…N/2` and then back down to 1.
    fn bins<'a, T>(&self, row: &'a [T]) -> impl Iterator<Item = &'a T> {
        row.iter().chain(row[1..self.cols - 1].iter().rev())
    }

    /// Calls `f(bin, entry)` over one ring in bin order, as two straight
    /// loops so the compiler sees plain slice walks.
    #[inline(always)]
    fn each_bin<T>(&self, row: &[T], mut f: impl FnMut(usize, &T)) {
        let h = self.cols - 1;
        for (b, k) in row.iter().enumerate() {
            f(b, k);
        }
        for (i, k) in row[1..h].iter().rev().enumerate() {
            f(h + 1 + i, k);
        }
    }

    /// Outward sweep. Writes `scale·H_n(k_bμ_L)·B^out(μ_L)` into `out` and
    /// returns `B^out(ρ_M)/s_n(ρ_M)` per bin.
    fn outward(&self, c: &[Complex64], out: &mut [Complex64], counter: Option<&MultCounter>) -> Vec<Complex64> {
        let n = self.angles;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..self.rings {
            let row = &self.coef[m * self.cols..(m + 1) * self.cols];
            let (cm, o) = (&c[m * n..(m + 1) * n], &mut out[m * n..(m + 1) * n]);
            self.each_bin(row, |b, k| {
                let (a, cv) = (acc[b], cm[b]);
                o[b] = k.h_mid * (a * k.lower_mid + cv * k.pj_half);
                acc[b] = a * k.edge + cv * k.pj_full;
            });
        }
        if let Some(k) = counter {
            let cells = (self.rings * n) as u64;
            k.add_complex(3 * cells);
            k.add_real(2 * cells);
        }
        acc
    }

    /// Inward sweep; adds `scale·J_n(k_bμ_L)·B^in(μ_L)` into `out`, along
    /// with the off-diagonal alias images of the band.
    fn inward(&self, c: &[Complex64], out: &mut [Complex64], counter: Option<&MultCounter>) {
        let n = self.angles;
        let width = 2 * self.band + 1;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut image_terms = 0u64;
        for m in (0..self.rings).rev() {
            let row = &self.coef[m * self.cols..(m + 1) * self.cols];
            let (cm, o) = (&c[m * n..(m + 1) * n], &mut out[m * n..(m + 1) * n]);
            self.each_bin(row, |b, k| {
                let (a, cv) = (acc[b], cm[b]);
                o[b] += k.j_mid * (a * k.upper_mid + cv * k.ph_half_u);
                acc[b] = a * k.edge + cv * k.ph_full;
            });
            if self.images.is_empty() {
                continue;
            }
            for j in (0..width).filter(|&j| j != self.band) {
                let Some(src) = (m + j).checked_sub(self.band).filter(|&s| s < self.rings) else { continue };
                let x = &self.images[(m * width + j) * self.cols..(m * width + j + 1) * self.cols];
                let cs = &c[src * n..(src + 1) * n];
                self.each_bin(x, |b, xv| o[b] += xv * cs[b]);
                image_terms += n as u64;
            }
        }
        if let Some(k) = counter {
            let cells = (self.rings * n) as u64;
            k.add_complex(3 * cells + image_terms);
            k.add_real(2 * cells);
        }
    }
}

/// Outward part `Ã^out(μ_L, n)` of the potential spectrum, and the rim
/// accumulator `B^out(ρ_M, n)/s_{|n|}(|k_b|ρ_M)` needed by the exterior field.
pub fn accumulate_outward(spec: &HarmonicField, t: &RingIntegralTable) -> (HarmonicField, Vec<Complex64>) {
    let sweep = Sweep::new(t, Complex64::new(0.0, -FRAC_PI_2), false);
    let mut out = HarmonicField::zeros(spec.rings, spec.angles);
    let rim = sweep.outward(&spec.data, &mut out.data, None);
    (out, rim)
}

/// Inward part `Ã^in(μ_L, n)` of the potential spectrum.
pub fn accumulate_inward(spec: &HarmonicField, t: &RingIntegralTable) -> HarmonicField {
    let sweep = Sweep::new(t, Complex64::new(0.0, -FRAC_PI_2), false);
    let mut out = HarmonicField::zeros(spec.rings, spec.angles);
    sweep.inward(&spec.data, &mut out.data, None);
    out
}

/// `Ã^out(ρ_obs, n) = (−jπ/2)·H_n^(2)(k_bρ_obs)·B^out(ρ_M, n)` for
/// `ρ_obs ≥ ρ_M`, from the scaled rim accumulator.
pub fn exterior_spectrum(rim: &[Complex64], k_b: Complex64, rho_rim: f64, rho_obs: f64) -> Result<Vec<Complex64>> {
    if !(rho_obs >= rho_rim) {
        return Err(Error::domain(format!(
            "exterior field needs ρ_obs ≥ ρ_M, got {rho_obs} < {rho_rim}"
        )));
    }
    let len = rim.len();
    let nmax = len / 2;
    let h = cyl_orders(CylKind::Hankel2, nmax, k_b * rho_obs)?;
    let ln_ratio = (rho_rim / rho_obs).ln();
    let pre = Complex64::new(0.0, -FRAC_PI_2);
    Ok(rim
        .iter()
        .enumerate()
        .map(|(b, &v)| {
            if v == Complex64::new(0.0, 0.0) {
                return v;
            }
            let n = harmonic_of_bin(b, len).unsigned_abs() as usize;
            pre * h.mantissa(n) * v * (n as f64 * ln_ratio).exp()
        })
        .collect())
}

/// The polar matrix-vector product `φ ↦ A_z` on a fixed grid.
#[derive(Debug)]
pub struct PolarOperator {
    grid: PolarGrid,
    k_b: Complex64,
    fft: RingFft,
    sweep: Sweep,
    phase: Vec<Complex64>,
    scratch: Mutex<Vec<Complex64>>,
    pub counter: MultCounter,
    pub precompute_seconds: f64,
}

impl PolarOperator {
    pub fn new(table: &RingIntegralTable) -> Self {
        let n = table.grid.angles;
        // The angular transform's 1/N and the half-cell phase cancel between
        // analysis and synthesis except for 1/N, folded into the factors.
        let scale = Complex64::new(0.0, -FRAC_PI_2) / n as f64;
        Self {
            grid: table.grid,
            k_b: table.k_b,
            fft: RingFft::new(n),
            sweep: Sweep::new(table, scale, true),
            phase: half_cell_phase(n),
            scratch: Mutex::new(Vec::new()),
            counter: MultCounter::default(),
            precompute_seconds: table.precompute_seconds,
        }
    }

    pub fn build(grid: &PolarGrid, k_b: Complex64) -> Result<Self> {
        Ok(Self::new(&RingIntegralTable::precompute(grid, k_b)?))
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn k_b(&self) -> Complex64 {
        self.k_b
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let mut scratch = self.scratch.lock().unwrap_or_else(|e| e.into_inner());
        self.fft.forward(buf, &mut scratch);
        self.counter.add_complex(self.grid.rings as u64 * fft_mults(self.grid.angles as u64));
    }

    /// `A_z` at the cell centres for source samples `φ = χE`, ring-major.
    pub fn apply(&self, source: &[Complex64], out: &mut [Complex64]) {
        self.apply_owned(source.to_vec(), out);
    }

    /// [`PolarOperator::apply`] reusing the caller's source buffer for the
    /// spectrum.
    pub fn apply_owned(&self, mut spec: Vec<Complex64>, out: &mut [Complex64]) {
        assert_eq!(spec.len(), self.grid.len());
        assert_eq!(out.len(), self.grid.len());
        self.forward(&mut spec);
        self.sweep.outward(&spec, out, Some(&self.counter));
        self.sweep.inward(&spec, out, Some(&self.counter));
        let mut scratch = self.scratch.lock().unwrap_or_else(|e| e.into_inner());
        self.fft.inverse(out, &mut scratch);
        self.counter.add_complex(self.grid.rings as u64 * fft_mults(self.grid.angles as u64));
    }

    pub fn apply_potential(&self, source: &PolarField) -> PolarField {
        let mut out = PolarField::zeros(&self.grid);
        self.apply(&source.data, &mut out.data);
        out
    }

    /// Rim accumulator `B^out(ρ_M, n)/s_{|n|}(|k_b|ρ_M)` in true harmonic
    /// normalization (half-cell phase and `1/N_φ` applied).
    pub fn rim(&self, source: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.angles;
        let mut spec = source.to_vec();
        let mut scratch = Vec::new();
        self.fft.forward(&mut spec, &mut scratch);
        let sw = &self.sweep;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..self.grid.rings {
            let row = &sw.coef[m * sw.cols..(m + 1) * sw.cols];
            for ((a, &cv), k) in acc.iter_mut().zip(&spec[m * n..(m + 1) * n]).zip(sw.bins(row)) {
                *a = *a * k.edge + cv * k.pj_full;
            }
        }
        let inv = 1.0 / n as f64;
        acc.iter().zip(&self.phase).zip(sw.bins(&sw.weights)).map(|((a, p), w)| a * p * inv * w).collect()
    }

    /// Scattered field `k_b²·A_z` at radius `rho_obs ≥ ρ_M` and the given
    /// angles, from the source `φ = χE`.
    pub fn scattered_field(&self, source: &[Complex64], rho_obs: f64, angles: &[f64]) -> Result<Vec<Complex64>> {
        let rim = self.rim(source);
        let spec = exterior_spectrum(&rim, self.k_b, self.grid.radius, rho_obs)?;
        let k2 = self.k_b * self.k_b;
        Ok(synthesize(&spec, angles).into_iter().map(|v| v * k2).collect())
    }
}
