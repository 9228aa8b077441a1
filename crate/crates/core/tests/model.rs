use num_complex::Complex64;
use polarmom::model::*;
use polarmom::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

const F: f64 = 1.2e9;

fn lambda() -> f64 {
    free_space_wavelength(F)
}

#[test]
fn wavenumber_examples() {
    let k = wavenumber(&Material::VACUUM, F);
    // Exact c; 3e8 would give 25.1327.
    assert!((k.re - 2.0 * PI * F / SPEED_OF_LIGHT).abs() < 1e-12);
    assert!((k.re - 25.1501).abs() < 1e-4);
    assert_eq!(k.im, 0.0);
    let k4 = wavenumber(&Material::new(4.0, 0.0), F);
    assert!((k4 - 2.0 * k).norm() < 1e-12);
    let lossy = wavenumber(&Material::new(4.0, 0.5), F);
    assert!(lossy.re > 0.0 && lossy.im < 0.0);
    // k² = ω²μ₀ε − jωμ₀σ
    let w = 2.0 * PI * F;
    let want = Complex64::new(w * w * MU_0 * EPSILON_0 * 4.0, -w * MU_0 * 0.5);
    assert!((lossy * lossy - want).norm() < 1e-12 * want.norm());
}

#[test]
fn contrast_examples() {
    let vac = Material::VACUUM;
    let map = MaterialMap::new(vec![
        Inclusion::circle([0.0, 0.0], 0.05, Material::new(2.56, 0.0)),
        Inclusion::circle([0.2, 0.0], 0.05, Material::new(45.0, 0.0)),
    ]);
    assert_eq!(contrast_at(&map, &vac, F, [0.5, 0.5]), Complex64::new(0.0, 0.0));
    assert!((contrast_at(&map, &vac, F, [0.0, 0.01]) - 1.56).norm() < 1e-12);
    assert!((contrast_at(&map, &vac, F, [0.2, 0.01]) - 44.0).norm() < 1e-12);
}

#[test]
fn cell_size_examples() {
    assert!((max_cell_size(1.0, F, 1.0) - 0.025).abs() < 3e-5);
    assert!((max_cell_size(45.0, F, 1.0) - lambda() / 45f64.sqrt() / 10.0).abs() < 1e-15);
    assert!((max_cell_size(45.0, F, 1.0) - 3.73e-3).abs() < 1e-5);
    assert!((max_cell_size(1.0, F, 4e-3) - 2e-3).abs() < 1e-15);
}

#[test]
fn incident_examples() {
    let k = wavenumber(&Material::VACUUM, F);
    let v = incident_field(k, &[[0.0, 0.0], [lambda() / 2.0, 0.3]]);
    assert!((v[0] - 1.0).norm() < 1e-15);
    assert!((v[1] + 1.0).norm() < 1e-12);
}

#[test]
fn empty_and_layered_sampling() {
    let g = PolarGrid::new(0.4 * lambda(), 8, 32).unwrap();
    let bg = Material::VACUUM;
    let empty = sample_contrast_polar(&MaterialMap::new(vec![]), &g, &bg, F).unwrap();
    assert!(empty.data.iter().all(|v| v.norm() == 0.0));
    let map = MaterialMap::new(vec![Inclusion::layered(
        [0.0, 0.0],
        vec![0.2 * lambda(), 0.4 * lambda()],
        vec![Material::new(1.5, 0.0), Material::new(3.0, 0.0)],
    )]);
    let chi = sample_contrast_polar(&map, &g, &bg, F).unwrap();
    for m in 0..g.rings {
        let ring = chi.ring(m);
        assert!(ring.iter().all(|v| *v == ring[0]));
        let want = if g.mid(m) <= 0.2 * lambda() { 0.5 } else { 2.0 };
        assert!((ring[0] - want).norm() < 1e-12);
    }
}

#[test]
fn square_area_by_cell_count() {
    let side = lambda() / 2.0;
    let map = MaterialMap::new(vec![Inclusion::rectangle([0.0, 0.0], [side, side], Material::new(2.56, 0.0))]);
    let bg = Material::VACUUM;
    let g = PolarGrid::new(side / 2.0 * 2f64.sqrt() * 1.01, 40, 256).unwrap();
    let chi = sample_contrast_polar(&map, &g, &bg, F).unwrap();
    let area: f64 = (0..g.rings)
        .map(|m| chi.ring(m).iter().filter(|v| v.norm() > 0.0).count() as f64 * g.cell_area(m))
        .sum();
    // One ring of cells around the perimeter bounds the discrepancy.
    let slack = 4.0 * side * g.delta();
    assert!((area - side * side).abs() <= slack, "{area} vs {}", side * side);

    let delta = lambda() / 40.0;
    let cg = CartesianGrid::covering([-side / 2.0, -side / 2.0, side / 2.0, side / 2.0], delta).unwrap();
    let chi = sample_contrast_cartesian(&map, &cg, &bg, F).unwrap();
    let area = chi.data.iter().filter(|v| v.norm() > 0.0).count() as f64 * cg.cell_area();
    assert!((area - side * side).abs() <= 4.0 * side * delta);
}

#[test]
fn builtin_scenarios_resolve_within_the_cell_rule() {
    for name in builtin_names() {
        let r = Scenario::builtin(name).unwrap().resolve().unwrap();
        assert!(!r.violates_cell_rule(), "{name}");
        assert!(r.polar.angles.is_power_of_two());
        assert!(r.observation.radius > r.polar.radius);
        let chi = sample_contrast_polar(&r.scenario.map, &r.polar, &r.scenario.background, r.scenario.frequency).unwrap();
        assert_eq!(chi.data.iter().any(|v| v.norm() > 0.0), !r.scenario.map.is_empty(), "{name}");
    }
}

#[test]
fn raster_scenario_from_file() {
    let dir = tempfile::tempdir().unwrap();
    // Bottom row is written last.
    std::fs::write(dir.path().join("eps.txt"), "# eps_r\n1 4\n2, 1\n").unwrap();
    std::fs::write(
        dir.path().join("raster.toml"),
        "frequency = 1.2e9\n[[object]]\nshape = \"raster\"\norigin = [-0.01, -0.01]\ncell = 0.01\nfile = \"eps.txt\"\n",
    )
    .unwrap();
    let s = Scenario::from_file(&dir.path().join("raster.toml")).unwrap();
    let bg = Material::VACUUM;
    assert!((contrast_at(&s.map, &bg, F, [-0.005, -0.005]) - 1.0).norm() < 1e-12);
    assert!((contrast_at(&s.map, &bg, F, [0.005, 0.005]) - 3.0).norm() < 1e-12);
    assert_eq!(contrast_at(&s.map, &bg, F, [0.005, -0.005]), Complex64::new(0.0, 0.0));

    std::fs::write(dir.path().join("eps.txt"), "1 4\n2\n").unwrap();
    assert!(matches!(Scenario::from_file(&dir.path().join("raster.toml")), Err(Error::Config(_))));
    assert!(matches!(Scenario::load("no-such-scenario"), Err(Error::Config(_))));
}

proptest! {
    #[test]
    fn cell_size_is_monotone(e1 in 1.0f64..80.0, de in 0.0f64..20.0, d1 in 1e-4f64..1.0, dd in 0.0f64..1.0) {
        prop_assert!(max_cell_size(e1 + de, F, d1) <= max_cell_size(e1, F, d1));
        prop_assert!(max_cell_size(e1, F, d1) <= max_cell_size(e1, F, d1 + dd));
    }

    #[test]
    fn lossless_incident_has_unit_modulus(x in -5.0f64..5.0, y in -5.0f64..5.0, eps in 1.0f64..50.0) {
        let k = wavenumber(&Material::new(eps, 0.0), F);
        prop_assert!((incident_field(k, &[[x, y]])[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centred_disk_samples_are_rotation_invariant(r in 0.05f64..0.39, eps in 1.1f64..10.0, sigma in 0.0f64..1.0) {
        let g = PolarGrid::new(0.4 * lambda(), 10, 64).unwrap();
        let map = MaterialMap::new(vec![Inclusion::circle([0.0, 0.0], r * lambda(), Material::new(eps, sigma))]);
        let chi = sample_contrast_polar(&map, &g, &Material::VACUUM, F).unwrap();
        for m in 0..g.rings {
            let ring = chi.ring(m);
            prop_assert!(ring.iter().all(|v| *v == ring[0]));
        }
    }
}
