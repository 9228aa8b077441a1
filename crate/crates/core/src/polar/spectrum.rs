use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::model::PolarField;

/// Per-ring angular Fourier coefficients, stored in FFT bin order: bin `b`
/// holds harmonic `n = b` for `b ≤ N_φ/2` and `n = b − N_φ` above, so the
/// harmonic range is `−N_φ/2+1 … N_φ/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicField {
    pub rings: usize,
    pub angles: usize,
    pub data: Vec<Complex64>,
}

/// Harmonic index of FFT bin `b` for length `n`.
pub fn harmonic_of_bin(b: usize, len: usize) -> i64 {
    if b <= len / 2 {
        b as i64
    } else {
        b as i64 - len as i64
    }
}

/// Bin holding harmonic `n`; `None` outside `−N/2+1 … N/2`.
pub fn bin_of_harmonic(n: i64, len: usize) -> Option<usize> {
    let half = (len / 2) as i64;
    if n > half || n <= -half {
        return None;
    }
    Some(if n >= 0 { n as usize } else { (n + len as i64) as usize })
}

impl HarmonicField {
    pub fn zeros(rings: usize, angles: usize) -> Self {
        Self { rings, angles, data: vec![Complex64::new(0.0, 0.0); rings * angles] }
    }

    pub fn coeff(&self, m: usize, n: i64) -> Complex64 {
        match bin_of_harmonic(n, self.angles) {
            Some(b) => self.data[m * self.angles + b],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, m: usize, n: i64, v: Complex64) {
        let b = bin_of_harmonic(n, self.angles).expect("harmonic outside the stored range");
        self.data[m * self.angles + b] = v;
    }

    pub fn ring(&self, m: usize) -> &[Complex64] {
        &self.data[m * self.angles..(m + 1) * self.angles]
    }
}

/// Forward/inverse FFT plans for one transform length.
#[derive(Clone)]
pub struct RingFft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RingFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RingFft").field("len", &self.len).finish()
    }
}

impl RingFft {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized `Σ_k x_k e^{−2πjbk/N}` on every consecutive length-N
    /// chunk of `buf`.
    pub fn forward(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        scratch.resize(self.forward.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        self.forward.process_with_scratch(buf, scratch);
    }

    /// Unnormalized `Σ_b X_b e^{+2πjbk/N}` on every chunk.
    pub fn inverse(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        scratch.resize(self.inverse.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        self.inverse.process_with_scratch(buf, scratch);
    }
}

/// `e^{−jnπ/N}` per bin: the phase of the half-cell angular offset.
pub fn half_cell_phase(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|b| {
            let n = harmonic_of_bin(b, len) as f64;
            Complex64::from_polar(1.0, -n * PI / len as f64)
        })
        .collect()
}

/// `φ̃(ρ_m, n) = (1/N_φ) Σ_k f(m,k) e^{−jnφ_k}` with `φ_k = (k+½)2π/N_φ`.
pub fn angular_spectrum(field: &PolarField) -> HarmonicField {
    let n = field.angles;
    let fft = RingFft::new(n);
    let mut data = field.data.clone();
    let mut scratch = Vec::new();
    fft.forward(&mut data, &mut scratch);
    let phase = half_cell_phase(n);
    let inv = 1.0 / n as f64;
    for ring in data.chunks_mut(n) {
        for (v, p) in ring.iter_mut().zip(&phase) {
            *v *= p * inv;
        }
    }
    HarmonicField { rings: field.rings, angles: n, data }
}

/// `f(m,k) = Σ_n φ̃(ρ_m, n) e^{jnφ_k}`, the exact inverse of
/// [`angular_spectrum`].
pub fn inverse_angular_spectrum(spec: &HarmonicField) -> PolarField {
    let n = spec.angles;
    let fft = RingFft::new(n);
    let phase = half_cell_phase(n);
    let mut data = spec.data.clone();
    for ring in data.chunks_mut(n) {
        for (v, p) in ring.iter_mut().zip(&phase) {
            *v *= p.conj();
        }
    }
    let mut scratch = Vec::new();
    fft.inverse(&mut data, &mut scratch);
    PolarField { rings: spec.rings, angles: n, data }
}

/// `Σ_n c_n e^{jnφ}` at each requested angle, harmonic `n` taken from bin
/// order as in [`HarmonicField`].
pub fn synthesize(coeffs: &[Complex64], angles: &[f64]) -> Vec<Complex64> {
    let len = coeffs.len();
    angles
        .iter()
        .map(|&phi| {
            coeffs
                .iter()
                .enumerate()
                .map(|(b, c)| c * Complex64::from_polar(1.0, harmonic_of_bin(b, len) as f64 * phi))
                .sum()
        })
        .collect()
}
