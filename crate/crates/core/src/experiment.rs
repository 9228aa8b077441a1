//! Solve, compare and benchmark drivers shared by the CLI and the tests.

use web_time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::cartesian::CartesianKernel;
use crate::error::Result;
use crate::model::{sample_contrast_cartesian, sample_contrast_polar, ObservationCircle, Resolved, Scenario};
use crate::oracle::{analytic_scattered, efficiency_gain, relative_error, LayeredCylinder};
use crate::polar::PolarOperator;
use crate::solver::{bcgs_solve, ForwardOperator, Method, SolveReport};

/// Builds the forward operator for one method on a resolved scenario.
pub fn build_operator(res: &Resolved, method: Method) -> Result<ForwardOperator> {
    let s = &res.scenario;
    match method {
        Method::Polar => {
            let chi = sample_contrast_polar(&s.map, &res.polar, &s.background, s.frequency)?;
            ForwardOperator::polar(PolarOperator::build(&res.polar, res.k_b)?, chi)
        }
        Method::Cartesian => {
            let chi = sample_contrast_cartesian(&s.map, &res.cartesian, &s.background, s.frequency)?;
            ForwardOperator::cartesian(CartesianKernel::build(&res.cartesian, res.k_b)?, chi)
        }
    }
}

/// Solves with one method and fills in the scattered field on the
/// scenario's observation circle.
pub fn run_method(res: &Resolved, method: Method, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let op = build_operator(res, method)?;
    let rhs = op.incident();
    let mut report = bcgs_solve(&op, &rhs, tol, max_iter)?;
    report.scattered = Some(op.scattered_on_circle(&report.field, &res.observation)?);
    Ok(report)
}

/// Where a comparison's reference field came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Reference {
    /// Exact series for a concentric layered cylinder.
    Analytic,
    /// A polar solve on a finer grid.
    Refined { delta: f64, rings: usize, angles: usize, converged: bool },
    /// No object: the scattered field is zero.
    Zero,
}

/// The analytic scattered field when the object is a concentric cylinder
/// about the origin.
pub fn analytic_reference(s: &Scenario, circle: &ObservationCircle) -> Result<Option<Vec<Complex64>>> {
    match s.map.as_concentric() {
        Some((radii, layers)) => {
            let cyl = LayeredCylinder::new(radii, layers, s.background)?;
            Ok(Some(analytic_scattered(&cyl, s.frequency, circle)?))
        }
        None => Ok(None),
    }
}

/// `(field, kind)` to compare against: analytic when available, otherwise a
/// polar solve at `refined_delta`, sampled on `circle`.
pub fn reference_field(
    s: &Scenario,
    circle: &ObservationCircle,
    refined_delta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, Reference)> {
    if s.map.is_empty() {
        return Ok((vec![Complex64::new(0.0, 0.0); circle.samples], Reference::Zero));
    }
    if let Some(f) = analytic_reference(s, circle)? {
        return Ok((f, Reference::Analytic));
    }
    let mut res = at_cell(s, refined_delta).resolve()?;
    res.observation = *circle;
    let rep = run_method(&res, Method::Polar, tol, max_iter)?;
    let kind = Reference::Refined {
        delta: res.polar.delta(),
        rings: res.polar.rings,
        angles: res.polar.angles,
        converged: rep.converged,
    };
    Ok((rep.scattered.expect("run_method fills the scattered field"), kind))
}

/// The scenario re-gridded at `delta`, with the polar disk fitted to the
/// object.
fn at_cell(s: &Scenario, delta: f64) -> Scenario {
    let mut out = s.with_cell(delta);
    if !s.map.is_empty() {
        out.grid.polar_radius = None;
    }
    out
}

/// Relative error, or 0 when both fields vanish.
fn error_against(reference: &[Complex64], computed: &[Complex64]) -> Result<f64> {
    if reference.iter().all(|v| v.norm() == 0.0) && computed.iter().all(|v| v.norm() == 0.0) {
        return Ok(0.0);
    }
    relative_error(reference, computed)
}

/// One method's row of a comparison.
#[derive(Clone, Debug, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub unit_cells: usize,
    /// `(M_ρ, N_φ)` or `(M_x, N_y)`.
    pub shape: [usize; 2],
    pub delta: f64,
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub seconds: f64,
    pub precompute_seconds: f64,
    pub model_mults_per_matvec: f64,
    pub empirical_mults: f64,
}

fn summarize(res: &Resolved, rep: &SolveReport, error: f64, include_precompute: bool) -> MethodSummary {
    let (shape, delta) = match rep.method {
        Method::Polar => ([res.polar.rings, res.polar.angles], res.polar.delta()),
        Method::Cartesian => ([res.cartesian.nx, res.cartesian.ny], res.cartesian.delta),
    };
    MethodSummary {
        method: rep.method,
        unit_cells: rep.unit_cells,
        shape,
        delta,
        error,
        iterations: rep.iterations,
        converged: rep.converged,
        final_residual: rep.final_residual(),
        seconds: rep.wall_seconds + if include_precompute { rep.precompute_seconds } else { 0.0 },
        precompute_seconds: rep.precompute_seconds,
        model_mults_per_matvec: rep.model_mults_per_matvec,
        empirical_mults: rep.empirical_mults,
    }
}

/// Both methods on one scenario against one reference.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub reference: Reference,
    pub polar: MethodSummary,
    pub cartesian: MethodSummary,
    /// `T_2D/T_1D`.
    pub time_ratio: f64,
    pub g_eff: f64,
    pub violates_cell_rule: bool,
    #[serde(skip)]
    pub reference_field: Vec<Complex64>,
    #[serde(skip)]
    pub reports: [SolveReport; 2],
}

impl Comparison {
    pub fn all_converged(&self) -> bool {
        self.polar.converged && self.cartesian.converged
    }
}

fn g_eff(polar: &MethodSummary, cart: &MethodSummary) -> f64 {
    // A run that stops at iteration 0 still costs one product.
    let it = |n: usize| n.max(1) as f64;
    efficiency_gain(
        it(cart.iterations),
        cart.shape[0] as f64,
        cart.shape[1] as f64,
        it(polar.iterations),
        polar.shape[0] as f64,
        polar.shape[1] as f64,
    )
}

/// Solves in a benchmark are repeated this many times and the fastest wall
/// time kept, so a busy machine does not decide which method wins.
pub const TIMING_REPEATS: usize = 3;

/// [`run_method`] `repeats` times, keeping the fastest run. The solves are
/// deterministic, so only the timing differs between runs.
fn run_fastest(res: &Resolved, method: Method, tol: f64, max_iter: usize, repeats: usize) -> Result<SolveReport> {
    let mut best = run_method(res, method, tol, max_iter)?;
    for _ in 1..repeats {
        let r = run_method(res, method, tol, max_iter)?;
        if r.wall_seconds < best.wall_seconds {
            best = r;
        }
    }
    Ok(best)
}

fn compare_against(
    res: &Resolved,
    reference: (Vec<Complex64>, Reference),
    tol: f64,
    max_iter: usize,
    include_precompute: bool,
    repeats: usize,
) -> Result<Comparison> {
    let (field, kind) = reference;
    let p = run_fastest(res, Method::Polar, tol, max_iter, repeats)?;
    let c = run_fastest(res, Method::Cartesian, tol, max_iter, repeats)?;
    let ep = error_against(&field, p.scattered.as_deref().unwrap_or_default())?;
    let ec = error_against(&field, c.scattered.as_deref().unwrap_or_default())?;
    let polar = summarize(res, &p, ep, include_precompute);
    let cartesian = summarize(res, &c, ec, include_precompute);
    Ok(Comparison {
        scenario: res.scenario.name.clone(),
        reference: kind,
        time_ratio: cartesian.seconds / polar.seconds,
        g_eff: g_eff(&polar, &cartesian),
        violates_cell_rule: res.violates_cell_rule(),
        polar,
        cartesian,
        reference_field: field,
        reports: [p, c],
    })
}

/// Runs both methods on the scenario's own discretization. The reference is
/// analytic for concentric cylinders and otherwise a polar solve at half the
/// cell size.
pub fn compare(res: &Resolved, tol: f64, max_iter: usize, include_precompute: bool) -> Result<Comparison> {
    let reference = reference_field(&res.scenario, &res.observation, res.delta / 2.0, tol, max_iter)?;
    compare_against(res, reference, tol, max_iter, include_precompute, 1)
}

/// One cell size of a benchmark sweep.
#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkRow {
    pub delta: f64,
    pub delta_max: f64,
    pub violates_cell_rule: bool,
    pub comparison: Comparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct Benchmark {
    pub scenario: String,
    pub reference: Reference,
    pub reference_seconds: f64,
    pub rows: Vec<BenchmarkRow>,
}

/// Both methods at each cell size of `sweep` (meters, strictly decreasing),
/// all measured against one reference: analytic when available, otherwise a
/// polar solve at half the smallest cell. Timings are the best of
/// [`TIMING_REPEATS`] solves.
pub fn benchmark(
    scenario: &Scenario,
    sweep: &[f64],
    tol: f64,
    max_iter: usize,
    include_precompute: bool,
) -> Result<Benchmark> {
    if sweep.is_empty() {
        return Err(crate::Error::config("benchmark sweep is empty"));
    }
    if sweep.iter().any(|d| !(d.is_finite() && *d > 0.0)) || sweep.windows(2).any(|w| w[1] >= w[0]) {
        return Err(crate::Error::config("benchmark sweep must be strictly decreasing positive cell sizes"));
    }
    let circle = at_cell(scenario, sweep[0]).resolve()?.observation;
    let start = Instant::now();
    let reference = reference_field(scenario, &circle, sweep[sweep.len() - 1] / 2.0, tol, max_iter)?;
    let reference_seconds = start.elapsed().as_secs_f64();
    let mut rows = Vec::with_capacity(sweep.len());
    for &delta in sweep {
        let mut res = at_cell(scenario, delta).resolve()?;
        res.observation = circle;
        let cmp = compare_against(&res, reference.clone(), tol, max_iter, include_precompute, TIMING_REPEATS)?;
        rows.push(BenchmarkRow { delta, delta_max: res.delta_max, violates_cell_rule: res.violates_cell_rule(), comparison: cmp });
    }
    Ok(Benchmark { scenario: scenario.name.clone(), reference: reference.1, reference_seconds, rows })
}
