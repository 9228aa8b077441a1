//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-14, rel: 1e-12, max_intervals: 2000 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    /// Estimate of `∫|f|`, the scale that rounding errors are relative to.
    pub magnitude: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut mag = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        let s = lo + hi;
        kron += s * WGK[j];
        mag += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Segment { a, b, value: kron * half, error: ((kron - gauss) * half).norm(), magnitude: mag * half.abs() }
}

/// Error estimates below this multiple of `ε∫|f|` are rounding noise, and
/// bisecting further cannot reduce them.
const ROUNDOFF_FLOOR: f64 = 50.0 * f64::EPSILON;

/// Integrates `f` over `[a, b]`, bisecting the segment with the largest error
/// estimate until `error <= max(abs, rel * |value|)` or the estimate reaches
/// the rounding floor of `∫|f|`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    if a == b {
        return QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, magnitude: 0.0, evaluations: 0, converged: true };
    }
    let first = kronrod(&mut f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_mag = first.magnitude;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut evaluations = 15;
    let mut intervals = 1;
    loop {
        if total_err <= tol.abs.max(tol.rel * total.norm()).max(ROUNDOFF_FLOOR * total_mag) {
            return QuadResult { value: total, error: total_err, magnitude: total_mag, evaluations, converged: true };
        }
        if intervals >= tol.max_intervals {
            break;
        }
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            heap.push(seg);
            break;
        }
        let (l, r) = (kronrod(&mut f, seg.a, mid), kronrod(&mut f, mid, seg.b));
        evaluations += 30;
        intervals += 1;
        total += l.value + r.value - seg.value;
        total_err += l.error + r.error - seg.error;
        total_mag += l.magnitude + r.magnitude - seg.magnitude;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to shed the drift of the running totals.
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
    let error = heap.iter().map(|s| s.error).sum();
    let magnitude = heap.iter().map(|s| s.magnitude).sum();
    QuadResult { value, error, magnitude, evaluations, converged: false }
}

/// Iterated 2-D integral `∫_a^b ∫_{lo(x)}^{hi(x)} f(x, y) dy dx`.
pub fn integrate_2d<F, L, H>(f: F, a: f64, b: f64, lo: L, hi: H, tol: Tolerance) -> QuadResult
where
    F: Fn(f64, f64) -> Complex64,
    L: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let mut inner_evals = 0;
    let mut inner_ok = true;
    let inner_tol = Tolerance { abs: tol.abs * 1e-2, rel: tol.rel * 1e-1, ..tol };
    let outer = integrate(
        |x| {
            let r = integrate(|y| f(x, y), lo(x), hi(x), inner_tol);
            inner_evals += r.evaluations;
            inner_ok &= r.converged;
            r.value
        },
        a,
        b,
        tol,
    );
    QuadResult { evaluations: outer.evaluations + inner_evals, converged: outer.converged && inner_ok, ..outer }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on
/// `P_n` from the Chebyshev initial guesses).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
