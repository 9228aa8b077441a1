//! Cylinder functions, Struve functions and the radial ring integrals used by
//! the polar operator.
//!
//! High orders at small arguments push `J_n` below and `H_n^(2)` above the
//! `f64` range long before the products the solver needs become extreme, so
//! the workhorse routines return [`Scaled`] values: a mantissa together with
//! the natural log of the scale `s_n(x) = (x/2)^n / n!` (or its reciprocal).

mod bessel;
mod ring;
mod struve;

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use ring::{
    asymptotic_ring_integral, in_asymptotic_regime, integral_g0, integral_g1, integral_rho_g0,
    integral_rho_g1, ring_integral, ring_integral_plain, ring_integral_scaled, ring_integrals,
    AsymptoticValue, RingInterval, RingSeries, Route, RouteCounts, CANCELLATION_RATIO,
    STRUVE_CLOSED_FORM_LIMIT,
};
pub use struve::{struve, struve_complex, struve_with_limit, STRUVE_SERIES_LIMIT};

/// Selects `G_n = J_n` or `G_n = H_n^(2) = J_n − jY_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CylKind {
    BesselJ,
    Hankel2,
}

/// A complex number stored as `mantissa · exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mantissa: Complex64::new(0.0, 0.0), log_scale: 0.0 };

    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        Self { mantissa, log_scale }
    }

    pub fn from_value(value: Complex64) -> Self {
        Self { mantissa: value, log_scale: 0.0 }
    }

    /// Plain value; may overflow or underflow.
    pub fn value(&self) -> Complex64 {
        self.relative_to(0.0)
    }

    /// `value / exp(log_ref)`.
    pub fn relative_to(&self, log_ref: f64) -> Complex64 {
        if self.mantissa == Complex64::new(0.0, 0.0) {
            return self.mantissa;
        }
        self.mantissa * (self.log_scale - log_ref).exp()
    }

    /// Natural log of the magnitude, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    pub fn scale(self, factor: Complex64) -> Self {
        Self { mantissa: self.mantissa * factor, ..self }
    }

    /// Sum, expressed relative to the larger of the two magnitudes.
    pub fn add(self, other: Scaled) -> Scaled {
        let (la, lb) = (self.ln_abs(), other.ln_abs());
        if lb == f64::NEG_INFINITY {
            return self;
        }
        if la == f64::NEG_INFINITY {
            return other;
        }
        let reference = if la >= lb { self.log_scale } else { other.log_scale };
        Scaled { mantissa: self.relative_to(reference) + other.relative_to(reference), log_scale: reference }
    }
}

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(1024);
        let mut acc = 0.0;
        t.push(0.0);
        for k in 1..1024 {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    if n < table.len() {
        return table[n];
    }
    // Stirling series; the next omitted term is below 1e-20 for n >= 1024.
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * std::f64::consts::TAU.ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
}

/// `ln s_n(x)` with `s_n(x) = (x/2)^n / n!`, the leading small-argument
/// magnitude of `J_n(x)`. `x` is a modulus.
pub fn log_scale(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    n as f64 * (0.5 * x).ln() - ln_factorial(n)
}

/// All orders `0..=nmax` of one cylinder function at one argument, scaled.
#[derive(Clone, Debug)]
pub struct CylOrders {
    kind: CylKind,
    arg_abs: f64,
    mantissa: Vec<Complex64>,
}

impl CylOrders {
    pub fn kind(&self) -> CylKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.mantissa.len() - 1
    }

    pub fn scaled(&self, n: usize) -> Scaled {
        let ls = log_scale(n, self.arg_abs);
        match self.kind {
            CylKind::BesselJ => Scaled::new(self.mantissa[n], ls),
            CylKind::Hankel2 => Scaled::new(self.mantissa[n], -ls),
        }
    }

    /// Mantissa relative to `s_n(|arg|)` (J) or `1/s_n(|arg|)` (H).
    pub fn mantissa(&self, n: usize) -> Complex64 {
        self.mantissa[n]
    }

    pub fn value(&self, n: usize) -> Complex64 {
        self.scaled(n).value()
    }
}

fn check_arg(kind: CylKind, arg: Complex64) -> Result<()> {
    if !arg.re.is_finite() || !arg.im.is_finite() {
        return Err(Error::domain(format!("non-finite argument {arg}")));
    }
    if kind == CylKind::Hankel2 && arg == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("Hankel function of the second kind is singular at zero"));
    }
    Ok(())
}

/// Orders `0..=nmax` of `kind` at `arg`.
pub fn cyl_orders(kind: CylKind, nmax: usize, arg: Complex64) -> Result<CylOrders> {
    check_arg(kind, arg)?;
    let mantissa = match kind {
        CylKind::BesselJ => bessel::j_scaled(arg, nmax),
        CylKind::Hankel2 => bessel::h2_scaled(arg, nmax),
    };
    if mantissa.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Range(format!("orders 0..={nmax} at {arg} are outside the scaled range")));
    }
    Ok(CylOrders { kind, arg_abs: arg.norm(), mantissa })
}

/// `G_n(arg)` for any integer order, using `G_{-n} = (-1)^n G_n`.
pub fn cyl_fn(kind: CylKind, order: i32, arg: Complex64) -> Result<Complex64> {
    let n = order.unsigned_abs() as usize;
    let v = cyl_orders(kind, n, arg)?.value(n);
    Ok(if order < 0 && n % 2 == 1 { -v } else { v })
}

pub fn cyl_fn_scaled(kind: CylKind, order: usize, arg: Complex64) -> Result<Scaled> {
    Ok(cyl_orders(kind, order, arg)?.scaled(order))
}

/// Neumann functions `Y_n(arg)`, `n = 0..=nmax`, as mantissas relative to
/// `1/s_n(|arg|)`.
pub(crate) fn neumann_scaled(nmax: usize, arg: Complex64) -> Result<Vec<Complex64>> {
    check_arg(CylKind::Hankel2, arg)?;
    Ok(bessel::y_scaled(arg, nmax))
}

pub(crate) fn bessel_scaled(nmax: usize, arg: Complex64) -> Result<Vec<Complex64>> {
    check_arg(CylKind::BesselJ, arg)?;
    Ok(bessel::j_scaled(arg, nmax))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn j0_at_origin() {
        assert_eq!(cyl_fn(CylKind::BesselJ, 0, c(0.0)).unwrap(), c(1.0));
        assert_eq!(cyl_fn(CylKind::BesselJ, 3, c(0.0)).unwrap(), c(0.0));
    }

    #[test]
    fn reflection_of_order() {
        for &x in &[0.3, 2.5, 17.0] {
            let p = cyl_fn(CylKind::BesselJ, 3, c(x)).unwrap();
            let m = cyl_fn(CylKind::BesselJ, -3, c(x)).unwrap();
            assert_eq!(m, -p);
            let p = cyl_fn(CylKind::Hankel2, 4, c(x)).unwrap();
            let m = cyl_fn(CylKind::Hankel2, -4, c(x)).unwrap();
            assert_eq!(m, p);
        }
    }

    #[test]
    fn hankel_at_zero_is_domain_error() {
        assert!(matches!(cyl_fn(CylKind::Hankel2, 0, c(0.0)), Err(Error::Domain(_))));
        assert!(matches!(cyl_fn(CylKind::BesselJ, 0, c(f64::NAN)), Err(Error::Domain(_))));
    }

    #[test]
    fn scaled_add_keeps_dominant_scale() {
        let a = Scaled::new(c(1.0), 800.0);
        let b = Scaled::new(c(1.0), 0.0);
        let s = a.add(b);
        assert_eq!(s.log_scale, 800.0);
        assert!((s.mantissa - c(1.0)).norm() < 1e-300);
    }

    #[test]
    fn ln_factorial_matches_stirling_seam() {
        let exact: f64 = (1..=1023).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(1023) - exact).abs() < 1e-9);
        let next = exact + 1024f64.ln();
        assert!((ln_factorial(1024) - next).abs() / next < 1e-14);
    }
}
