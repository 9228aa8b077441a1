mod common;

use common::*;
use num_complex::Complex64;
use polarmom::model::{free_space_wavelength, incident_field, wavenumber, CartesianGrid, Material, ObservationCircle, PolarGrid};
use polarmom::oracle::*;
use polarmom::Error;
use proptest::prelude::*;
use std::f64::consts::TAU;

const F: f64 = 1.2e9;

fn lambda() -> f64 {
    free_space_wavelength(F)
}

fn k0() -> Complex64 {
    wavenumber(&Material::VACUUM, F)
}

fn two_layer() -> LayeredCylinder {
    LayeredCylinder::new(
        vec![0.2 * lambda(), 0.4 * lambda()],
        vec![Material::new(1.5, 0.0), Material::new(3.0, 0.0)],
        Material::VACUUM,
    )
    .unwrap()
}

#[test]
fn zero_contrast_scatters_nothing() {
    let cyl = LayeredCylinder::new(vec![0.1, 0.2], vec![Material::VACUUM; 2], Material::VACUUM).unwrap();
    let circle = ObservationCircle::new(0.5, 24).unwrap();
    assert!(analytic_scattered(&cyl, F, &circle).unwrap().iter().all(|v| v.norm() < 1e-15));
}

#[test]
fn identical_layers_collapse_to_one() {
    let m = Material::new(2.5, 0.01);
    let one = LayeredCylinder::new(vec![0.3 * lambda()], vec![m], Material::VACUUM).unwrap();
    let two = LayeredCylinder::new(vec![0.1 * lambda(), 0.3 * lambda()], vec![m, m], Material::VACUUM).unwrap();
    let circle = ObservationCircle::new(0.9 * lambda(), 36).unwrap();
    let (a, b) = (analytic_scattered(&one, F, &circle).unwrap(), analytic_scattered(&two, F, &circle).unwrap());
    assert!(relative_error(&a, &b).unwrap() < 1e-12);
}

#[test]
fn bad_cylinders_are_rejected() {
    assert!(matches!(LayeredCylinder::new(vec![0.2, 0.1], vec![Material::VACUUM; 2], Material::VACUUM), Err(Error::Config(_))));
    assert!(matches!(LayeredCylinder::new(vec![0.2], vec![], Material::VACUUM), Err(Error::Config(_))));
    let circle = ObservationCircle::new(0.3 * lambda(), 8).unwrap();
    assert!(matches!(analytic_scattered(&two_layer(), F, &circle), Err(Error::Domain(_))));
}

#[test]
fn weak_disk_matches_born_integral() {
    let chi = 0.01;
    let r = 0.2 * lambda();
    let cyl = LayeredCylinder::new(vec![r], vec![Material::new(1.0 + chi, 0.0)], Material::VACUUM).unwrap();
    let circle = ObservationCircle::new(3.0 * r, 16).unwrap();
    let exact = analytic_scattered(&cyl, F, &circle).unwrap();
    let g = PolarGrid::new(r, 16, 64).unwrap();
    let k = k0();
    let src: Vec<Complex64> = incident_field(k, &g.points()).into_iter().map(|v| v * chi).collect();
    let born: Vec<Complex64> =
        direct_quadrature_potential(CellSet::Polar(&g), &src, k, &circle.points()).unwrap().into_iter().map(|v| v * k * k).collect();
    assert!(relative_error(&exact, &born).unwrap() <= 1e-2);
}

#[test]
fn lossless_series_conserves_energy() {
    // Scattering width (4/k)Σ|T_n|² equals extinction −(4/k)ΣRe T_n.
    let t = scattering_coefficients(&two_layer(), F, 40).unwrap();
    let both = |f: &dyn Fn(Complex64) -> f64| f(t[0]) + 2.0 * t[1..].iter().map(|&v| f(v)).sum::<f64>();
    let scat = both(&|v| v.norm_sqr());
    let ext = -both(&|v| v.re);
    assert!(scat > 0.0);
    assert!((scat - ext).abs() <= 1e-6 * ext);
}

#[test]
fn far_field_power_matches_coefficients() {
    // ρ∮|E^s|²dφ → (4/k)Σ|T_n|² as kρ → ∞; the correction is O(1/kρ).
    let cyl = two_layer();
    let k = k0().re;
    let t = scattering_coefficients(&cyl, F, 40).unwrap();
    let width = 4.0 / k * (t[0].norm_sqr() + 2.0 * t[1..].iter().map(|v| v.norm_sqr()).sum::<f64>());
    let circle = ObservationCircle::new(1e4 * lambda(), 256).unwrap();
    let es = analytic_scattered(&cyl, F, &circle).unwrap();
    let power = circle.radius * TAU / 256.0 * es.iter().map(|v| v.norm_sqr()).sum::<f64>();
    assert!((power - width).abs() <= 1e-4 * width, "{power} vs {width}");
}

#[test]
fn lossy_layers_absorb() {
    let lossy = LayeredCylinder::new(vec![0.3 * lambda()], vec![Material::new(4.0, 0.05)], Material::VACUUM).unwrap();
    let t = scattering_coefficients(&lossy, F, 30).unwrap();
    for v in t {
        // Extinction exceeds scattering order by order.
        assert!(-v.re >= v.norm_sqr());
    }
}

#[test]
fn quadrature_basics() {
    let g = CartesianGrid::new(3, 3, 0.005, [0.0, 0.0]).unwrap();
    let zero = vec![Complex64::new(0.0, 0.0); g.len()];
    let pts = [[0.3, 0.1], [0.0075, 0.0075]];
    assert!(direct_quadrature_potential(CellSet::Cartesian(&g), &zero, k0(), &pts).unwrap().iter().all(|v| v.norm() == 0.0));
    // A single cell seen from far away looks like a point.
    let mut one = zero.clone();
    one[4] = Complex64::new(1.0, 0.0);
    let c = g.center(1, 1);
    let far = [c[0] + 0.2, c[1]];
    let got = direct_quadrature_potential(CellSet::Cartesian(&g), &one, k0(), &[far]).unwrap()[0];
    let want = Complex64::new(0.0, -0.25) * hankel2(0, k0().re * 0.2) * g.cell_area();
    assert!(rel_err(want, got) < 1e-3);
}

#[test]
fn self_cell_is_finite_and_matches_disk_estimate() {
    // The square cell and its equal-area disk differ only slightly at the centre.
    let d = lambda() / 40.0;
    let g = CartesianGrid::new(1, 1, d, [0.0, 0.0]).unwrap();
    let got = direct_quadrature_potential(CellSet::Cartesian(&g), &[Complex64::new(1.0, 0.0)], k0(), &[g.center(0, 0)]).unwrap()[0];
    let a = d / std::f64::consts::PI.sqrt();
    let disk = Complex64::new(0.0, -0.25) * TAU * ring_oracle(true, 0, true, 0.0, a, k0().re);
    assert!(got.re.is_finite() && got.im.is_finite());
    assert!(rel_err(disk, got) < 2e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadrature_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = CartesianGrid::new(3, 2, 0.01, [0.0, 0.0]).unwrap();
        let f: Vec<Complex64> = (0..g.len()).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let h: Vec<Complex64> = (0..g.len()).map(|i| Complex64::new(1.0, -(i as f64))).collect();
        let alpha = Complex64::new(a, b);
        let mix: Vec<Complex64> = f.iter().zip(&h).map(|(x, y)| alpha * x + y).collect();
        let pts = [[0.015, 0.005], [0.2, -0.1]];
        let q = |s: &[Complex64]| direct_quadrature_potential(CellSet::Cartesian(&g), s, k0(), &pts).unwrap();
        let (qf, qh) = (q(&f), q(&h));
        let want: Vec<Complex64> = qf.iter().zip(&qh).map(|(x, y)| alpha * x + y).collect();
        prop_assert!(rel_err_vec(&want, &q(&mix)) < 1e-12);
    }

    #[test]
    fn relative_error_is_scale_invariant(re in 0.1f64..10.0, im in -10.0f64..10.0, seed in 0u64..1000) {
        let r: Vec<Complex64> = (0..8).map(|i| Complex64::new((i as f64 + seed as f64).sin(), 0.3 * i as f64)).collect();
        let c: Vec<Complex64> = r.iter().enumerate().map(|(i, v)| v * (1.0 + 0.01 * i as f64)).collect();
        let s = Complex64::new(re, im);
        let rs: Vec<Complex64> = r.iter().map(|v| v * s).collect();
        let cs: Vec<Complex64> = c.iter().map(|v| v * s).collect();
        let (e1, e2) = (relative_error(&r, &c).unwrap(), relative_error(&rs, &cs).unwrap());
        prop_assert!(e1 >= 0.0);
        prop_assert!((e1 - e2).abs() < 1e-12 * e1.max(1e-300));
    }

    #[test]
    fn efficiency_gain_is_linear_in_iterations(n2 in 1.0f64..500.0, n1 in 1.0f64..500.0, m in 8.0f64..128.0) {
        let g = efficiency_gain(n2, m, m, n1, m, 64.0);
        prop_assert!(g > 0.0);
        prop_assert!((efficiency_gain(2.0 * n2, m, m, n1, m, 64.0) - 2.0 * g).abs() < 1e-12 * g);
    }
}
