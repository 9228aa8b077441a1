use std::f64::consts::PI;
use web_time::Instant;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::PolarGrid;
use crate::specfun::{cyl_orders, log_scale, ring_integrals, CylKind, RingInterval, RouteCounts, Scaled};

/// Background-only radial integrals for every ring and order `0…N_φ/2`.
///
/// Values are stored as mantissas relative to `s_n(|k_b|ρ)`, with
/// `s_n(x) = (x/2)^n/n!`, at a ring-specific reference radius, so that the
/// sweeps never form quantities that over- or underflow:
///
/// | table       | interval          | stored as                    |
/// |-------------|-------------------|------------------------------|
/// | `pj_full`   | `[ρ_m, ρ_{m+1}]`  | `∫ρ′J_n / s_n(ρ_{m+1})`      |
/// | `pj_half`   | `[ρ_m, μ_m]`      | `∫ρ′J_n / s_n(μ_m)`          |
/// | `ph_full`   | `[ρ_m, ρ_{m+1}]`  | `∫ρ′H_n^(2) · s_n(ρ_m)`      |
/// | `ph_half_u` | `[μ_m, ρ_{m+1}]`  | `∫ρ′H_n^(2) · s_n(μ_m)`      |
/// | `j_mid`     | `μ_m`             | `J_n(k_bμ_m) / s_n(μ_m)`     |
/// | `h_mid`     | `μ_m`             | `H_n^(2)(k_bμ_m) · s_n(μ_m)` |
///
/// Rings are 0-based here: ring `m` spans `[ρ_m, ρ_{m+1}]` with midpoint
/// `μ_m`. `ph_full` of the innermost ring diverges for `n ≥ 2` and is never
/// needed; it is stored as zero.
#[derive(Clone, Debug)]
pub struct RingIntegralTable {
    pub grid: PolarGrid,
    pub k_b: Complex64,
    /// Highest stored order, `N_φ/2`.
    pub nmax: usize,
    pub(crate) pj_full: Vec<Complex64>,
    pub(crate) pj_half: Vec<Complex64>,
    pub(crate) ph_full: Vec<Complex64>,
    pub(crate) ph_half_u: Vec<Complex64>,
    pub(crate) j_mid: Vec<Complex64>,
    pub(crate) h_mid: Vec<Complex64>,
    /// `(ρ_m/ρ_{m+1})^n`.
    pub(crate) edge_ratio: Vec<f64>,
    /// `(ρ_m/μ_m)^n`.
    pub(crate) lower_mid_ratio: Vec<f64>,
    /// `(μ_m/ρ_{m+1})^n`.
    pub(crate) upper_mid_ratio: Vec<f64>,
    /// Rings coupled through alias images on each side, see [`image_band`].
    pub image_band: usize,
    /// `X_n(l, l+s) = Σ_{0<|p|≤P} w_q·G_q(l, l+s)`, `q = n+pN`, for
    /// `|s| ≤ image_band`: the coupling carried by harmonics that alias onto
    /// `n`. `G_q` is the ring-to-ring coefficient of order `q` and `w` the
    /// pulse weight. Indexed `[(l·(2B+1) + s+B)·(nmax+1) + n]`, zero where
    /// `l+s` is off the grid.
    pub(crate) images: Vec<Complex64>,
    pub routes: RouteCounts,
    pub precompute_seconds: f64,
}

/// Alias images `n + pN`, `0 < |p| ≤ ALIAS_IMAGES`, kept in the image band.
pub const ALIAS_IMAGES: usize = 3;

/// Image couplings whose geometric decay estimate falls below this are
/// left out of the band.
pub const IMAGE_TOL: f64 = 1e-3;

/// Smallest `B` such that every alias coupling between rings more than `B`
/// apart is below [`IMAGE_TOL`]. The lowest image order is `N_φ/2`, and a
/// coupling of order `q` from ring `m` seen at `μ_l` decays like
/// `(ρ_{m+1}/μ_l)^q` outward and `(μ_l/ρ_m)^q` inward.
pub fn image_band(grid: &PolarGrid) -> usize {
    let q = (grid.angles / 2) as f64;
    let worst = |s: usize| {
        (0..grid.rings)
            .flat_map(|l| {
                let out = l.checked_sub(s).map(|m| (grid.edge(m + 1) / grid.mid(l)).powf(q));
                let inw = (l + s < grid.rings).then(|| (grid.mid(l) / grid.edge(l + s)).powf(q));
                out.into_iter().chain(inw)
            })
            .fold(0.0, f64::max)
    };
    (0..grid.rings).find(|&b| worst(b + 1) < IMAGE_TOL).unwrap_or(grid.rings.saturating_sub(1))
}

/// `sinc(nπ/N)`: the angular Fourier coefficient of a pulse of width `2π/N`
/// relative to its centre sample.
pub fn pulse_weight(n: i64, angles: usize) -> f64 {
    let x = n as f64 * PI / angles as f64;
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

struct RingRows {
    pj_full: Vec<Complex64>,
    pj_half: Vec<Complex64>,
    ph_full: Vec<Complex64>,
    ph_half_u: Vec<Complex64>,
    j_mid: Vec<Complex64>,
    h_mid: Vec<Complex64>,
    edge_ratio: Vec<f64>,
    lower_mid_ratio: Vec<f64>,
    upper_mid_ratio: Vec<f64>,
    ext: ImageOrders,
    routes: RouteCounts,
}

/// One ring's integrals and midpoint values up to the highest image order.
struct ImageOrders {
    jf: Vec<Scaled>,
    hf: Option<Vec<Scaled>>,
    jh: Vec<Scaled>,
    hu: Vec<Scaled>,
    jm: Vec<Scaled>,
    hm: Vec<Scaled>,
}

fn mul(a: Scaled, b: Scaled) -> Complex64 {
    Scaled::new(a.mantissa * b.mantissa, a.log_scale + b.log_scale).value()
}

/// Order-`q` coupling from ring `m` to the midpoint of ring `l`.
fn coupling(e: &[ImageOrders], l: usize, m: usize, q: usize) -> Complex64 {
    use std::cmp::Ordering::*;
    match m.cmp(&l) {
        Less => mul(e[l].hm[q], e[m].jf[q]),
        Greater => mul(e[l].jm[q], e[m].hf.as_ref().expect("outer rings have ρ_m > 0")[q]),
        Equal => mul(e[l].hm[q], e[l].jh[q]) + mul(e[l].jm[q], e[l].hu[q]),
    }
}

fn pow_ratio(ratio: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else if ratio == 0.0 {
        0.0
    } else {
        (n as f64 * ratio.ln()).exp()
    }
}

fn ring_rows(grid: &PolarGrid, k_b: Complex64, nmax: usize, m: usize) -> Result<RingRows> {
    let kabs = k_b.norm();
    let (lo, hi, mid) = (grid.edge(m), grid.edge(m + 1), grid.mid(m));
    let full = RingInterval::new(lo, hi, k_b)?;
    let lower_half = RingInterval::new(lo, mid, k_b)?;
    let upper_half = RingInterval::new(mid, hi, k_b)?;

    let n_ext = nmax + ALIAS_IMAGES * 2 * nmax;
    let jf = ring_integrals(CylKind::BesselJ, n_ext, &full)?;
    let jh = ring_integrals(CylKind::BesselJ, n_ext, &lower_half)?;
    let hu = ring_integrals(CylKind::Hankel2, n_ext, &upper_half)?;
    let hf = if lo > 0.0 {
        Some(ring_integrals(CylKind::Hankel2, n_ext, &full)?)
    } else {
        None
    };
    let jm = cyl_orders(CylKind::BesselJ, n_ext, k_b * mid)?;
    let hm = cyl_orders(CylKind::Hankel2, n_ext, k_b * mid)?;

    let mut routes = RouteCounts::default();
    for s in [&jf, &jh, &hu].into_iter().chain(hf.as_ref()) {
        routes.merge(&s.counts());
    }

    let rel = |s: Scaled, log_ref: f64| s.relative_to(log_ref);
    let mut rows = RingRows {
        pj_full: Vec::with_capacity(nmax + 1),
        pj_half: Vec::with_capacity(nmax + 1),
        ph_full: Vec::with_capacity(nmax + 1),
        ph_half_u: Vec::with_capacity(nmax + 1),
        j_mid: Vec::with_capacity(nmax + 1),
        h_mid: Vec::with_capacity(nmax + 1),
        edge_ratio: Vec::with_capacity(nmax + 1),
        lower_mid_ratio: Vec::with_capacity(nmax + 1),
        upper_mid_ratio: Vec::with_capacity(nmax + 1),
        ext: ImageOrders {
            jf: jf.rho.clone(),
            hf: hf.as_ref().map(|s| s.rho.clone()),
            jh: jh.rho.clone(),
            hu: hu.rho.clone(),
            jm: (0..=n_ext).map(|q| jm.scaled(q)).collect(),
            hm: (0..=n_ext).map(|q| hm.scaled(q)).collect(),
        },
        routes,
    };
    for n in 0..=nmax {
        let ls_hi = log_scale(n, kabs * hi);
        let ls_mid = log_scale(n, kabs * mid);
        rows.pj_full.push(rel(jf.rho[n], ls_hi));
        rows.pj_half.push(rel(jh.rho[n], ls_mid));
        rows.ph_half_u.push(rel(hu.rho[n], -ls_mid));
        rows.ph_full.push(match &hf {
            Some(s) => rel(s.rho[n], -log_scale(n, kabs * lo)),
            None => Complex64::new(0.0, 0.0),
        });
        rows.j_mid.push(jm.mantissa(n));
        rows.h_mid.push(hm.mantissa(n));
        rows.edge_ratio.push(pow_ratio(lo / hi, n));
        rows.lower_mid_ratio.push(pow_ratio(lo / mid, n));
        rows.upper_mid_ratio.push(pow_ratio(mid / hi, n));
    }
    Ok(rows)
}

fn image_couplings(grid: &PolarGrid, nmax: usize, band: usize, ext: &[ImageOrders]) -> Vec<Complex64> {
    let (angles, width) = (grid.angles as i64, 2 * band + 1);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.rings * width * (nmax + 1)];
    for l in 0..grid.rings {
        for j in 0..width {
            let Some(m) = (l + j).checked_sub(band).filter(|&m| m < grid.rings) else { continue };
            for n in 0..=nmax {
                let mut x = Complex64::new(0.0, 0.0);
                for p in 1..=ALIAS_IMAGES as i64 {
                    for q in [n as i64 + p * angles, n as i64 - p * angles] {
                        x += coupling(ext, l, m, q.unsigned_abs() as usize) * pulse_weight(q, grid.angles);
                    }
                }
                out[(l * width + j) * (nmax + 1) + n] = x;
            }
        }
    }
    out
}

impl RingIntegralTable {
    pub fn precompute(grid: &PolarGrid, k_b: Complex64) -> Result<Self> {
        let start = Instant::now();
        let nmax = grid.angles / 2;

        #[cfg(feature = "parallel")]
        let rows: Vec<Result<RingRows>> = {
            use rayon::prelude::*;
            (0..grid.rings).into_par_iter().map(|m| ring_rows(grid, k_b, nmax, m)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let rows: Vec<Result<RingRows>> = (0..grid.rings).map(|m| ring_rows(grid, k_b, nmax, m)).collect();

        let mut t = RingIntegralTable {
            grid: *grid,
            k_b,
            nmax,
            pj_full: Vec::with_capacity(grid.rings * (nmax + 1)),
            pj_half: Vec::new(),
            ph_full: Vec::new(),
            ph_half_u: Vec::new(),
            j_mid: Vec::new(),
            h_mid: Vec::new(),
            edge_ratio: Vec::new(),
            lower_mid_ratio: Vec::new(),
            upper_mid_ratio: Vec::new(),
            image_band: image_band(grid),
            images: Vec::new(),
            routes: RouteCounts::default(),
            precompute_seconds: 0.0,
        };
        let mut ext = Vec::with_capacity(grid.rings);
        for r in rows {
            let r = r?;
            ext.push(r.ext);
            t.pj_full.extend(r.pj_full);
            t.pj_half.extend(r.pj_half);
            t.ph_full.extend(r.ph_full);
            t.ph_half_u.extend(r.ph_half_u);
            t.j_mid.extend(r.j_mid);
            t.h_mid.extend(r.h_mid);
            t.edge_ratio.extend(r.edge_ratio);
            t.lower_mid_ratio.extend(r.lower_mid_ratio);
            t.upper_mid_ratio.extend(r.upper_mid_ratio);
            t.routes.merge(&r.routes);
        }
        t.images = image_couplings(grid, nmax, t.image_band, &ext);
        t.precompute_seconds = start.elapsed().as_secs_f64();
        Ok(t)
    }

    fn idx(&self, m: usize, n: usize) -> usize {
        assert!(m < self.grid.rings && n <= self.nmax, "table index ({m}, {n}) out of range");
        m * (self.nmax + 1) + n
    }

    fn ls(&self, n: usize, rho: f64) -> f64 {
        log_scale(n, self.k_b.norm() * rho)
    }

    /// `∫_{ρ_m}^{ρ_{m+1}} ρ′J_n(k_bρ′) dρ′`.
    pub fn pj_full(&self, m: usize, n: usize) -> Scaled {
        Scaled::new(self.pj_full[self.idx(m, n)], self.ls(n, self.grid.edge(m + 1)))
    }

    /// `∫_{ρ_m}^{μ_m} ρ′J_n(k_bρ′) dρ′`.
    pub fn pj_half(&self, m: usize, n: usize) -> Scaled {
        Scaled::new(self.pj_half[self.idx(m, n)], self.ls(n, self.grid.mid(m)))
    }

    /// `∫_{ρ_m}^{ρ_{m+1}} ρ′H_n^(2)(k_bρ′) dρ′`; `None` for the innermost
    /// ring at `n ≥ 2`, where the integral diverges.
    pub fn ph_full(&self, m: usize, n: usize) -> Option<Scaled> {
        if m == 0 {
            if n >= 2 {
                return None;
            }
            // ρ_0 = 0 makes the stored reference scale degenerate for n = 1;
            // recompute directly.
            let iv = RingInterval::new(0.0, self.grid.edge(1), self.k_b).ok()?;
            return ring_integrals(CylKind::Hankel2, n, &iv).ok().map(|s| s.rho[n]);
        }
        Some(Scaled::new(self.ph_full[self.idx(m, n)], -self.ls(n, self.grid.edge(m))))
    }

    /// `∫_{μ_m}^{ρ_{m+1}} ρ′H_n^(2)(k_bρ′) dρ′`.
    pub fn ph_half_u(&self, m: usize, n: usize) -> Scaled {
        Scaled::new(self.ph_half_u[self.idx(m, n)], -self.ls(n, self.grid.mid(m)))
    }

    /// `J_n(k_bμ_m)`.
    pub fn j_mid(&self, m: usize, n: usize) -> Scaled {
        Scaled::new(self.j_mid[self.idx(m, n)], self.ls(n, self.grid.mid(m)))
    }

    /// `H_n^(2)(k_bμ_m)`.
    pub fn h_mid(&self, m: usize, n: usize) -> Scaled {
        Scaled::new(self.h_mid[self.idx(m, n)], -self.ls(n, self.grid.mid(m)))
    }

    pub fn matches(&self, grid: &PolarGrid, k_b: Complex64) -> bool {
        self.grid == *grid && self.k_b == k_b
    }
}
