//! Browser bindings: solve a built-in scenario, compare the two operators,
//! and evaluate the layered-cylinder series. Results go to JavaScript as
//! JSON strings.

use polarmom::experiment;
use polarmom::model::{builtin_names, free_space_wavelength, Material, ObservationCircle, Scenario};
use polarmom::oracle::{analytic_scattered, LayeredCylinder};
use polarmom::solver::Method;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn to_json(v: &impl Serialize) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(js)
}

#[derive(Serialize)]
struct Pattern {
    angles_deg: Vec<f64>,
    magnitude: Vec<f64>,
    /// Analytic magnitude when the scenario is a concentric cylinder.
    exact: Option<Vec<f64>>,
    iterations: usize,
    converged: bool,
    final_residual: f64,
    unit_cells: usize,
    empirical_mults: f64,
    seconds: f64,
}

/// Names accepted by [`solve`] and [`compare`], comma-separated.
#[wasm_bindgen]
pub fn scenarios() -> String {
    builtin_names().join(",")
}

/// Solves a built-in scenario with `method` ("polar" or "cartesian") and
/// returns the scattered-field magnitude on the observation circle.
#[wasm_bindgen]
pub fn solve(name: &str, method: &str, tol: f64) -> Result<String, JsError> {
    let method = match method {
        "polar" => Method::Polar,
        "cartesian" => Method::Cartesian,
        other => return Err(js(format!("unknown method {other:?}"))),
    };
    let res = Scenario::load(name).and_then(|s| s.resolve()).map_err(js)?;
    let rep = experiment::run_method(&res, method, tol, 500).map_err(js)?;
    let exact = experiment::analytic_reference(&res.scenario, &res.observation).map_err(js)?;
    let degrees = |c: &ObservationCircle| c.angles().into_iter().map(f64::to_degrees).collect();
    to_json(&Pattern {
        angles_deg: degrees(&res.observation),
        magnitude: rep.scattered.as_deref().unwrap_or_default().iter().map(|v| v.norm()).collect(),
        exact: exact.map(|e| e.iter().map(|v| v.norm()).collect()),
        iterations: rep.iterations,
        converged: rep.converged,
        final_residual: rep.final_residual(),
        unit_cells: rep.unit_cells,
        empirical_mults: rep.empirical_mults,
        seconds: rep.wall_seconds,
    })
}

/// Both operators on one built-in scenario; the comparison row as JSON.
#[wasm_bindgen]
pub fn compare(name: &str, tol: f64) -> Result<String, JsError> {
    let res = Scenario::load(name).and_then(|s| s.resolve()).map_err(js)?;
    to_json(&experiment::compare(&res, tol, 500, false).map_err(js)?)
}

/// Exact scattered magnitude of a two-layer lossless cylinder in vacuum.
/// Radii are in free-space wavelengths; the circle sits at `1.5·r_outer`.
#[wasm_bindgen]
pub fn layered_cylinder(frequency: f64, eps_inner: f64, eps_outer: f64, r_inner: f64, r_outer: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let lambda = free_space_wavelength(frequency);
    let cyl = LayeredCylinder::new(
        vec![r_inner * lambda, r_outer * lambda],
        vec![Material::new(eps_inner, 0.0), Material::new(eps_outer, 0.0)],
        Material::VACUUM,
    )
    .map_err(js)?;
    let circle = ObservationCircle::new(1.5 * r_outer * lambda, samples).map_err(js)?;
    Ok(analytic_scattered(&cyl, frequency, &circle).map_err(js)?.iter().map(|v| v.norm()).collect())
}
