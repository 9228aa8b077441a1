//! `polarmom` command-line front end. All numbers come from the library;
//! this file only parses arguments and formats output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarmom::experiment::{self, Benchmark, Comparison};
use polarmom::model::{Resolved, Scenario};
use polarmom::solver::{Method, SolveReport};
use polarmom::{validation, Error};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "polarmom", version, about = "2-D TM scattering with polar and Cartesian FFT operators")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write the scattered field and a run report.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = MethodArg::Polar)]
        method: MethodArg,
    },
    /// Run both methods on one scenario and print a comparison row.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Add operator setup time to the solve times.
        #[arg(long)]
        include_precompute: bool,
    },
    /// Sweep cell sizes and tabulate error, timing and efficiency gain.
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Comma-separated cell sizes, strictly decreasing. Plain numbers are
        /// meters; a `mm` suffix is accepted, e.g. `6mm,4mm,3mm,2mm`.
        #[arg(long, value_delimiter = ',', required = true)]
        sweep: Vec<String>,
        #[arg(long)]
        include_precompute: bool,
    },
    /// Run the built-in numerical checks.
    Validate {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file, or the name of a built-in scenario.
    #[arg(long)]
    scenario: String,
    /// Relative residual tolerance; overrides the scenario's `[solver]` value
    /// (default 1e-4).
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap; overrides the scenario's value (default 500).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Polar,
    Cartesian,
    Both,
}

impl MethodArg {
    fn methods(self) -> &'static [Method] {
        match self {
            MethodArg::Polar => &[Method::Polar],
            MethodArg::Cartesian => &[Method::Cartesian],
            MethodArg::Both => &[Method::Polar, Method::Cartesian],
        }
    }
}

/// Exit statuses: bad input, no convergence, numerical failure.
const EXIT_CONFIG: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::Range(_) | Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Solve { common, method } => solve(&common, method),
        Command::Compare { common, include_precompute } => compare(&common, include_precompute),
        Command::Benchmark { common, sweep, include_precompute } => benchmark(&common, &sweep, include_precompute),
        Command::Validate { out } => validate(&out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("polarmom: solver did not reach the tolerance; results were still written");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e) => {
            eprintln!("polarmom: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// The resolved scenario with the command-line solver settings applied.
fn resolve(common: &Common) -> Result<Resolved, Error> {
    let mut s = Scenario::load(&common.scenario)?;
    if let Some(tol) = common.tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Config(format!("--tol must lie in (0, 1), got {tol}")));
        }
        s.solver.tol = tol;
    }
    if let Some(n) = common.max_iter {
        if n == 0 {
            return Err(Error::Config("--max-iter must be positive".into()));
        }
        s.solver.max_iter = n;
    }
    fs::create_dir_all(&common.out)?;
    s.resolve()
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn json(value: &impl Serialize) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Error::Numerical(format!("cannot encode report: {e}")))
}

fn grid_text(res: &Resolved, method: Method) -> String {
    match method {
        Method::Polar => format!("{} rings x {} angles, radius {:e} m", res.polar.rings, res.polar.angles, res.polar.radius),
        Method::Cartesian => format!("{} x {} cells of {:e} m", res.cartesian.nx, res.cartesian.ny, res.cartesian.delta),
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    scenario: &'a str,
    method: Method,
    grid: String,
    delta: f64,
    delta_max: f64,
    violates_cell_rule: bool,
    observation_radius: f64,
    observation_samples: usize,
    unit_cells: usize,
    iterations: usize,
    matvecs: usize,
    restarts: usize,
    converged: bool,
    tol: f64,
    final_residual: f64,
    residuals: &'a [f64],
    model_mults_per_matvec: f64,
    model_mults: f64,
    empirical_mults: f64,
    wall_seconds: f64,
    precompute_seconds: f64,
}

fn field_csv(res: &Resolved, rep: &SolveReport) -> String {
    let obs = &res.observation;
    let mut s = String::new();
    let _ = writeln!(s, "# scenario: {}", res.scenario.name);
    let _ = writeln!(s, "# method: {}", rep.method);
    let _ = writeln!(s, "# grid: {}", grid_text(res, rep.method));
    let _ = writeln!(s, "# frequency: {:e} Hz", res.scenario.frequency);
    let _ = writeln!(s, "# observation: radius {:e} m, {} samples", obs.radius, obs.samples);
    let _ = writeln!(s, "# iterations: {}, converged: {}, final residual: {:e}", rep.iterations, rep.converged, rep.final_residual());
    let _ = writeln!(s, "angle_deg,re,im,abs");
    let field = rep.scattered.as_deref().unwrap_or_default();
    for (phi, v) in obs.angles().into_iter().zip(field) {
        let _ = writeln!(s, "{},{:e},{:e},{:e}", phi.to_degrees(), v.re, v.im, v.norm());
    }
    s
}

fn solve(common: &Common, method: MethodArg) -> Result<bool, Error> {
    let res = resolve(common)?;
    if res.violates_cell_rule() {
        eprintln!("warning: cell size {:e} m exceeds the rule bound {:e} m", res.delta, res.delta_max);
    }
    let mut converged = true;
    for &m in method.methods() {
        let rep = experiment::run_method(&res, m, res.scenario.solver.tol, res.scenario.solver.max_iter)?;
        let stem = format!("{}-{}", res.scenario.name, m);
        write(&common.out.join(format!("{stem}-field.csv")), &field_csv(&res, &rep))?;
        let report = RunReport {
            scenario: &res.scenario.name,
            method: m,
            grid: grid_text(&res, m),
            delta: res.delta,
            delta_max: res.delta_max,
            violates_cell_rule: res.violates_cell_rule(),
            observation_radius: res.observation.radius,
            observation_samples: res.observation.samples,
            unit_cells: rep.unit_cells,
            iterations: rep.iterations,
            matvecs: rep.matvecs,
            restarts: rep.restarts,
            converged: rep.converged,
            tol: rep.tol,
            final_residual: rep.final_residual(),
            residuals: &rep.residuals,
            model_mults_per_matvec: rep.model_mults_per_matvec,
            model_mults: rep.model_mults,
            empirical_mults: rep.empirical_mults,
            wall_seconds: rep.wall_seconds,
            precompute_seconds: rep.precompute_seconds,
        };
        write(&common.out.join(format!("{stem}-report.json")), &json(&report)?)?;
        println!(
            "{m}: {} unit cells, {} iterations, residual {:.3e}, {:.3e} s",
            rep.unit_cells,
            rep.iterations,
            rep.final_residual(),
            rep.wall_seconds
        );
        converged &= rep.converged;
    }
    Ok(converged)
}

const COMPARE_HEADER: &str = "scenario,delta_m,e_polar,e_cartesian,time_ratio,g_eff,iter_polar,iter_cartesian,cells_polar,cells_cartesian,cell_rule_warning";

fn compare_row(c: &Comparison, delta: f64) -> String {
    format!(
        "{},{:e},{:.6e},{:.6e},{:.4},{:.4},{},{},{},{},{}",
        c.scenario,
        delta,
        c.polar.error,
        c.cartesian.error,
        c.time_ratio,
        c.g_eff,
        c.polar.iterations,
        c.cartesian.iterations,
        c.polar.unit_cells,
        c.cartesian.unit_cells,
        if c.violates_cell_rule { "cell-size-rule-violated" } else { "" }
    )
}

fn compare(common: &Common, include_precompute: bool) -> Result<bool, Error> {
    let res = resolve(common)?;
    let c = experiment::compare(&res, res.scenario.solver.tol, res.scenario.solver.max_iter, include_precompute)?;
    let table = format!("{COMPARE_HEADER}\n{}\n", compare_row(&c, res.delta));
    print!("{table}");
    let stem = format!("{}-compare", c.scenario);
    write(&common.out.join(format!("{stem}.csv")), &table)?;
    write(&common.out.join(format!("{stem}.json")), &json(&c)?)?;
    Ok(c.all_converged())
}

fn parse_length(s: &str) -> Result<f64, Error> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix("mm") {
        Some(n) => (n, 1e-3),
        None => (t.strip_suffix('m').unwrap_or(t), 1.0),
    };
    num.trim().parse::<f64>().map(|v| v * scale).map_err(|_| Error::Config(format!("bad cell size {s:?} in --sweep")))
}

fn benchmark_tables(b: &Benchmark) -> (String, String) {
    let mut table = String::new();
    let _ = writeln!(table, "# scenario: {}", b.scenario);
    let _ = writeln!(table, "# reference: {}", serde_json::to_string(&b.reference).unwrap_or_default());
    let _ = writeln!(
        table,
        "delta_m,delta_max_m,cells_polar,cells_cartesian,e_polar,e_cartesian,t_polar_s,t_cartesian_s,time_ratio,g_eff,iter_polar,iter_cartesian,cell_rule_warning"
    );
    let mut series = String::from("method,unit_cells,delta_m,error\n");
    for r in &b.rows {
        let c = &r.comparison;
        let _ = writeln!(
            table,
            "{:e},{:e},{},{},{:.6e},{:.6e},{:.6},{:.6},{:.4},{:.4},{},{},{}",
            r.delta,
            r.delta_max,
            c.polar.unit_cells,
            c.cartesian.unit_cells,
            c.polar.error,
            c.cartesian.error,
            c.polar.seconds,
            c.cartesian.seconds,
            c.time_ratio,
            c.g_eff,
            c.polar.iterations,
            c.cartesian.iterations,
            if r.violates_cell_rule { "cell-size-rule-violated" } else { "" }
        );
        for m in [&c.polar, &c.cartesian] {
            let _ = writeln!(series, "{},{},{:e},{:.6e}", m.method, m.unit_cells, r.delta, m.error);
        }
    }
    (table, series)
}

fn benchmark(common: &Common, sweep: &[String], include_precompute: bool) -> Result<bool, Error> {
    let sweep = sweep.iter().map(|s| parse_length(s)).collect::<Result<Vec<_>, _>>()?;
    let res = resolve(common)?;
    let b = experiment::benchmark(&res.scenario, &sweep, res.scenario.solver.tol, res.scenario.solver.max_iter, include_precompute)?;
    let (table, series) = benchmark_tables(&b);
    print!("{table}");
    let stem = format!("{}-benchmark", b.scenario);
    write(&common.out.join(format!("{stem}.csv")), &table)?;
    write(&common.out.join(format!("{}-error-vs-cells.csv", b.scenario)), &series)?;
    write(&common.out.join(format!("{stem}.json")), &json(&b)?)?;
    Ok(b.rows.iter().all(|r| r.comparison.all_converged()))
}

fn validate(out: &Path) -> Result<bool, Error> {
    fs::create_dir_all(out)?;
    let checks = validation::run_all()?;
    for c in &checks {
        println!("{} {:<40} {:.3e} (tolerance {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    write(&out.join("validation.json"), &json(&checks)?)?;
    if checks.iter().all(|c| c.passed) {
        Ok(true)
    } else {
        Err(Error::Numerical("some validation checks failed".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(parse_length("6mm").unwrap(), 6e-3);
        assert_eq!(parse_length(" 0.004 ").unwrap(), 0.004);
        assert_eq!(parse_length("0.5m").unwrap(), 0.5);
        assert!(matches!(parse_length("six"), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Numerical("x".into())), EXIT_NUMERICAL);
    }
}
