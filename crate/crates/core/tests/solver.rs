mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use polarmom::cartesian::CartesianKernel;
use polarmom::model::{free_space_wavelength, wavenumber, CartesianField, CartesianGrid, Material, ObservationCircle, PolarField, PolarGrid};
use polarmom::oracle::{direct_quadrature_potential, relative_error, CellSet};
use polarmom::polar::PolarOperator;
use polarmom::solver::*;
use polarmom::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F: f64 = 1.2e9;

fn k0() -> Complex64 {
    wavenumber(&Material::VACUUM, F)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// 8×16 polar grid with χ = 0.1 inside the inner 60% of the radius.
fn disk_operator() -> ForwardOperator {
    let g = PolarGrid::new(0.3 * free_space_wavelength(F), 8, 16).unwrap();
    let chi: Vec<Complex64> = (0..g.rings)
        .flat_map(|m| {
            let v = if g.mid(m) < 0.6 * g.radius { 0.1 } else { 0.0 };
            std::iter::repeat(Complex64::new(v, 0.0)).take(g.angles)
        })
        .collect();
    ForwardOperator::polar(PolarOperator::build(&g, k0()).unwrap(), PolarField::from_vec(&g, chi).unwrap()).unwrap()
}

/// Column-by-column dense copy of `L`.
fn dense(op: &ForwardOperator) -> DMatrix<Complex64> {
    let n = op.len();
    let mut a = DMatrix::from_element(n, n, zero());
    let mut e = vec![zero(); n];
    let mut col = vec![zero(); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        op.apply_l(&e, &mut col);
        e[j] = zero();
        for i in 0..n {
            a[(i, j)] = col[i];
        }
    }
    a
}

fn random(seed: u64, len: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

#[test]
fn matches_dense_lu() {
    let op = disk_operator();
    let rhs = op.incident();
    let lu = dense(&op).lu();
    let x = lu.solve(&DVector::from_vec(rhs.clone())).unwrap();
    let rep = bcgs_solve(&op, &rhs, 1e-10, 500).unwrap();
    assert!(rep.converged);
    assert!(rel_err_vec(x.as_slice(), &rep.field) < 1e-6);
    assert!(*rep.residuals.last().unwrap() <= 1e-10);
}

#[test]
fn zero_contrast_converges_immediately() {
    let g = PolarGrid::new(0.1, 8, 16).unwrap();
    let op = ForwardOperator::polar(PolarOperator::build(&g, k0()).unwrap(), PolarField::zeros(&g)).unwrap();
    let rhs = op.incident();
    let mut out = vec![zero(); rhs.len()];
    op.apply_l(&rhs, &mut out);
    assert_eq!(out, rhs);
    let rep = bcgs_solve(&op, &rhs, 1e-4, 500).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 0);
    assert_eq!(rep.final_residual(), 0.0);
    assert_eq!(rep.field, rhs);
    let circle = ObservationCircle::new(0.3, 16).unwrap();
    assert!(op.scattered_on_circle(&rep.field, &circle).unwrap().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn zero_field_maps_to_zero() {
    let op = disk_operator();
    let mut out = vec![Complex64::new(1.0, 1.0); op.len()];
    op.apply_l(&vec![zero(); op.len()], &mut out);
    assert!(out.iter().all(|v| v.norm() == 0.0));
    let rep = bcgs_solve(&op, &vec![zero(); op.len()], 1e-4, 10).unwrap();
    assert!(rep.converged && rep.iterations == 0);
}

#[test]
fn apply_l_matches_direct_quadrature() {
    let op = disk_operator();
    let e = random(3, op.len());
    let mut got = vec![zero(); e.len()];
    op.apply_l(&e, &mut got);
    let g = PolarGrid::new(0.3 * free_space_wavelength(F), 8, 16).unwrap();
    let src: Vec<Complex64> = e.iter().zip(op.chi()).map(|(a, c)| a * c).collect();
    let a = direct_quadrature_potential(CellSet::Polar(&g), &src, k0(), &g.points()).unwrap();
    let k2 = k0() * k0();
    let want: Vec<Complex64> = e.iter().zip(&a).map(|(x, y)| x - k2 * y).collect();
    assert!(rel_err_vec(&want, &got) < 1e-3);
}

#[test]
fn bad_inputs_are_rejected() {
    let op = disk_operator();
    let rhs = op.incident();
    assert!(matches!(bcgs_solve(&op, &rhs, 0.0, 10), Err(Error::Config(_))));
    assert!(matches!(bcgs_solve(&op, &rhs[1..], 1e-4, 10), Err(Error::Config(_))));
    let mut bad = rhs.clone();
    bad[3] = Complex64::new(f64::NAN, 0.0);
    assert!(matches!(bcgs_solve(&op, &bad, 1e-4, 10), Err(Error::Numerical(_))));
    let inside = ObservationCircle::new(0.01, 8).unwrap();
    assert!(matches!(op.scattered_on_circle(&rhs, &inside), Err(Error::Domain(_))));
}

#[test]
fn iteration_cap_is_a_reported_state() {
    let g = PolarGrid::new(0.5 * free_space_wavelength(F), 10, 32).unwrap();
    let chi = PolarField::from_vec(&g, vec![Complex64::new(3.0, -0.5); g.len()]).unwrap();
    let op = ForwardOperator::polar(PolarOperator::build(&g, k0()).unwrap(), chi).unwrap();
    let rep = bcgs_solve(&op, &op.incident(), 1e-14, 2).unwrap();
    assert!(!rep.converged);
    assert!(rep.iterations <= 2);
    assert!(rep.final_residual() > 1e-14);
}

#[test]
fn converged_field_reproduces_rhs() {
    let op = disk_operator();
    let rhs = op.incident();
    let rep = bcgs_solve(&op, &rhs, 1e-6, 500).unwrap();
    let mut l = vec![zero(); rhs.len()];
    op.apply_l(&rep.field, &mut l);
    assert!(relative_error(&rhs, &l).unwrap() <= 1e-6);
    assert_eq!(rep.residuals.len(), rep.iterations + 1);
}

#[test]
fn backends_agree_on_a_disk() {
    // The same 0.2λ disk, χ = 0.5, meshed both ways.
    let lambda = free_space_wavelength(F);
    let r = 0.2 * lambda;
    let chi_v = Complex64::new(0.5, 0.0);
    let pg = PolarGrid::new(r, 12, 64).unwrap();
    let polar = ForwardOperator::polar(
        PolarOperator::build(&pg, k0()).unwrap(),
        PolarField::from_vec(&pg, vec![chi_v; pg.len()]).unwrap(),
    )
    .unwrap();
    let delta = lambda / 40.0;
    let cg = CartesianGrid::covering([-r, -r, r, r], delta).unwrap();
    let chi: Vec<Complex64> = cg.points().iter().map(|p| if p[0].hypot(p[1]) < r { chi_v } else { zero() }).collect();
    let cart = ForwardOperator::cartesian(
        CartesianKernel::build(&cg, k0()).unwrap(),
        CartesianField::from_vec(&cg, chi).unwrap(),
    )
    .unwrap();
    let circle = ObservationCircle::new(3.0 * r, 36).unwrap();
    let es = |op: &ForwardOperator| {
        let rep = bcgs_solve(op, &op.incident(), 1e-8, 500).unwrap();
        assert!(rep.converged);
        op.scattered_on_circle(&rep.field, &circle).unwrap()
    };
    assert!(relative_error(&es(&polar), &es(&cart)).unwrap() < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn apply_l_is_linear(seed in any::<u64>(), a in -2.0f64..2.0) {
        let op = disk_operator();
        let (f, h) = (random(seed, op.len()), random(seed ^ 3, op.len()));
        let alpha = Complex64::new(a, 0.7);
        let mix: Vec<Complex64> = f.iter().zip(&h).map(|(x, y)| alpha * x + y).collect();
        let mut lf = vec![zero(); f.len()];
        let mut lh = lf.clone();
        let mut lm = lf.clone();
        op.apply_l(&f, &mut lf);
        op.apply_l(&h, &mut lh);
        op.apply_l(&mix, &mut lm);
        let want: Vec<Complex64> = lf.iter().zip(&lh).map(|(x, y)| alpha * x + y).collect();
        prop_assert!(rel_err_vec(&want, &lm) < 1e-12);
    }

    #[test]
    fn incident_scaling_scales_the_solution(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let op = disk_operator();
        let alpha = Complex64::new(re, im);
        let rhs = op.incident();
        let scaled: Vec<Complex64> = rhs.iter().map(|v| alpha * v).collect();
        let a = bcgs_solve(&op, &rhs, 1e-8, 500).unwrap();
        let b = bcgs_solve(&op, &scaled, 1e-8, 500).unwrap();
        let want: Vec<Complex64> = a.field.iter().map(|v| alpha * v).collect();
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert!(rel_err_vec(&want, &b.field) < 1e-10);
        // Rounding grows through the recurrences, so late entries agree to
        // well below the tolerance but not to the last bit.
        for (x, y) in a.residuals.iter().zip(&b.residuals) {
            prop_assert!((x - y).abs() <= 1e-6 * x, "{x} vs {y}");
        }
    }
}
