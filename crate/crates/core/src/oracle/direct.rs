//! Brute-force evaluation of `A_z(r) = (−j/4)∬ H_0^(2)(k_b|r − r′|) φ(r′) dr′`
//! with `φ` constant on each cell.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{CartesianGrid, PolarGrid};
use crate::quad::{gauss_legendre, integrate_2d, Tolerance};
use crate::specfun::{cyl_fn, CylKind};

/// The cells a piecewise-constant source lives on.
#[derive(Clone, Copy, Debug)]
pub enum CellSet<'a> {
    Polar(&'a PolarGrid),
    Cartesian(&'a CartesianGrid),
}

fn kernel(k_b: Complex64, r: f64) -> Complex64 {
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let h0 = cyl_fn(CylKind::Hankel2, 0, k_b * r).expect("finite nonzero argument");
    Complex64::new(0.0, -0.25) * h0
}

/// A cell as a tensor-product region in either `(ρ, φ)` or `(x, y)`.
#[derive(Clone, Copy)]
struct Cell {
    polar: bool,
    u: [f64; 2],
    v: [f64; 2],
    center: [f64; 2],
    size: f64,
}

impl Cell {
    fn point(&self, u: f64, v: f64) -> ([f64; 2], f64) {
        if self.polar {
            ([u * v.cos(), u * v.sin()], u)
        } else {
            ([u, v], 1.0)
        }
    }

    /// Coordinates of `p` in this cell's parametrization, if inside.
    fn contains(&self, p: [f64; 2]) -> Option<(f64, f64)> {
        let (u, mut v) = if self.polar {
            (p[0].hypot(p[1]), p[1].atan2(p[0]))
        } else {
            (p[0], p[1])
        };
        if self.polar {
            while v < self.v[0] {
                v += TAU;
            }
            while v > self.v[1] {
                v -= TAU;
            }
        }
        let inside = u >= self.u[0] && u <= self.u[1] && v >= self.v[0] && v <= self.v[1];
        inside.then_some((u, v))
    }
}

fn cells(set: CellSet<'_>) -> Vec<Cell> {
    match set {
        CellSet::Polar(g) => {
            let dphi = TAU / g.angles as f64;
            let mut out = Vec::with_capacity(g.len());
            for m in 0..g.rings {
                for k in 0..g.angles {
                    let phi = g.phi(k);
                    let mid = g.mid(m);
                    out.push(Cell {
                        polar: true,
                        u: [g.edge(m), g.edge(m + 1)],
                        v: [phi - 0.5 * dphi, phi + 0.5 * dphi],
                        center: [mid * phi.cos(), mid * phi.sin()],
                        size: g.delta().max(g.edge(m + 1) * dphi),
                    });
                }
            }
            out
        }
        CellSet::Cartesian(g) => g
            .points()
            .into_iter()
            .map(|c| Cell {
                polar: false,
                u: [c[0] - 0.5 * g.delta, c[0] + 0.5 * g.delta],
                v: [c[1] - 0.5 * g.delta, c[1] + 0.5 * g.delta],
                center: c,
                size: g.delta,
            })
            .collect(),
    }
}

struct Rules {
    far: (Vec<f64>, Vec<f64>),
    near: (Vec<f64>, Vec<f64>),
}

fn tensor_gauss(cell: &Cell, rule: &(Vec<f64>, Vec<f64>), k_b: Complex64, p: [f64; 2]) -> Complex64 {
    let (x, w) = rule;
    let (uc, uh) = (0.5 * (cell.u[0] + cell.u[1]), 0.5 * (cell.u[1] - cell.u[0]));
    let (vc, vh) = (0.5 * (cell.v[0] + cell.v[1]), 0.5 * (cell.v[1] - cell.v[0]));
    let mut s = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        for (xj, wj) in x.iter().zip(w) {
            let (q, jac) = cell.point(uc + uh * xi, vc + vh * xj);
            s += kernel(k_b, (q[0] - p[0]).hypot(q[1] - p[1])) * (wi * wj * jac);
        }
    }
    s * (uh * vh)
}

/// Adaptive integral over a cell containing `p`, split at `p` so the
/// logarithmic singularity sits on sub-cell corners.
fn singular(cell: &Cell, k_b: Complex64, p: [f64; 2], at: (f64, f64)) -> Complex64 {
    let tol = Tolerance { abs: 1e-15, rel: 1e-9, max_intervals: 400 };
    let us = [cell.u[0], at.0, cell.u[1]];
    let vs = [cell.v[0], at.1, cell.v[1]];
    let mut s = Complex64::new(0.0, 0.0);
    for iu in 0..2 {
        for iv in 0..2 {
            if us[iu] == us[iu + 1] || vs[iv] == vs[iv + 1] {
                continue;
            }
            let (v0, v1) = (vs[iv], vs[iv + 1]);
            let r = integrate_2d(
                |u, v| {
                    let (q, jac) = cell.point(u, v);
                    kernel(k_b, (q[0] - p[0]).hypot(q[1] - p[1])) * jac
                },
                us[iu],
                us[iu + 1],
                |_| v0,
                |_| v1,
                tol,
            );
            s += r.value;
        }
    }
    s
}

/// `∬_cell (−j/4)H_0^(2)(k_b|p − r′|) dr′` for one cell and point.
fn cell_integral(cell: &Cell, rules: &Rules, k_b: Complex64, p: [f64; 2]) -> Complex64 {
    if let Some(at) = cell.contains(p) {
        return singular(cell, k_b, p, at);
    }
    let d = (cell.center[0] - p[0]).hypot(cell.center[1] - p[1]);
    if d < 3.0 * cell.size {
        tensor_gauss(cell, &rules.near, k_b, p)
    } else {
        tensor_gauss(cell, &rules.far, k_b, p)
    }
}

/// `A_z` at each point for a source constant on each cell (storage order of
/// the grid). Cells containing a point are integrated adaptively, nearby
/// cells with a 12×12 and distant ones with a 4×4 Gauss–Legendre rule.
pub fn direct_quadrature_potential(
    set: CellSet<'_>,
    source: &[Complex64],
    k_b: Complex64,
    points: &[[f64; 2]],
) -> Result<Vec<Complex64>> {
    let cells = cells(set);
    assert_eq!(cells.len(), source.len(), "source does not match the cell set");
    let rules = Rules { far: gauss_legendre(4), near: gauss_legendre(12) };
    let one = |p: &[f64; 2]| -> Complex64 {
        cells
            .iter()
            .zip(source)
            .filter(|(_, s)| s.norm() != 0.0)
            .map(|(c, s)| s * cell_integral(c, &rules, k_b, *p))
            .sum()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(points.par_iter().map(one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(points.iter().map(one).collect())
    }
}
