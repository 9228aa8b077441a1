//! TOML scenario files and the built-in scenarios.
//!
//! ```toml
//! name = "two-layer"
//! units = "wavelength"        # or "meter" (default)
//! frequency = 1.2e9           # Hz
//!
//! [background]
//! eps_r = 1.0
//! sigma = 0.0
//!
//! [[object]]
//! shape = "layered"
//! radii = [0.2, 0.4]
//! eps_r = [1.5, 3.0]
//!
//! [grid]                      # every key optional
//! cell = 0.05                 # default: largest size allowed by the cell-size rule
//! polar_radius = 0.4          # default: object extent, split into rings ≤ cell
//! rings = 8
//! angles = 64                 # default: automatic power of two
//!
//! [observation]
//! radius_factor = 3.0         # × object extent radius; or `radius = …`
//! samples = 360
//!
//! [solver]
//! tol = 1e-4
//! max_iter = 500
//! ```
//!
//! Raster objects read a whitespace-separated matrix of `eps_r` values (and
//! optionally a matching `sigma` matrix). The first line of the file is the
//! top row of the image.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    free_space_wavelength, max_cell_size, wavenumber, CartesianGrid, Inclusion, Material, MaterialMap,
    ObservationCircle, PolarGrid, Shape,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Meter,
    Wavelength,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub cell: Option<f64>,
    pub polar_radius: Option<f64>,
    pub rings: Option<usize>,
    pub angles: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationSettings {
    pub radius: Option<f64>,
    #[serde(default = "default_radius_factor")]
    pub radius_factor: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_radius_factor() -> f64 {
    3.0
}

fn default_samples() -> usize {
    360
}

impl Default for ObservationSettings {
    fn default() -> Self {
        Self { radius: None, radius_factor: default_radius_factor(), samples: default_samples() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-4
}

fn default_max_iter() -> usize {
    500
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter() }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    #[serde(default)]
    units: Units,
    frequency: f64,
    #[serde(default)]
    background: Material,
    #[serde(default, rename = "object")]
    objects: Vec<ObjectEntry>,
    #[serde(default)]
    grid: GridSettings,
    #[serde(default)]
    observation: ObservationSettings,
    #[serde(default)]
    solver: SolverSettings,
}

#[derive(Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
enum ObjectEntry {
    Circle {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        eps_r: f64,
        #[serde(default)]
        sigma: f64,
    },
    Rectangle {
        #[serde(default)]
        center: [f64; 2],
        size: [f64; 2],
        eps_r: f64,
        #[serde(default)]
        sigma: f64,
    },
    Layered {
        #[serde(default)]
        center: [f64; 2],
        radii: Vec<f64>,
        eps_r: Vec<f64>,
        sigma: Option<Vec<f64>>,
    },
    Raster {
        #[serde(default)]
        origin: [f64; 2],
        cell: f64,
        file: PathBuf,
        sigma_file: Option<PathBuf>,
    },
}

/// A scattering problem with all lengths in meters.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub frequency: f64,
    pub background: Material,
    pub map: MaterialMap,
    pub grid: GridSettings,
    pub observation: ObservationSettings,
    pub solver: SolverSettings,
}

/// A scenario with its grids fixed.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    pub k_b: Complex64,
    pub eps_r_max: f64,
    /// Bound from the cell-size rule.
    pub delta_max: f64,
    /// Requested cell size (Cartesian side; polar thickness is the nearest
    /// value that fits a whole number of rings).
    pub delta: f64,
    pub polar: PolarGrid,
    pub cartesian: CartesianGrid,
    pub observation: ObservationCircle,
}

impl Resolved {
    /// True when either grid is coarser than the cell-size rule allows.
    pub fn violates_cell_rule(&self) -> bool {
        let limit = self.delta_max * (1.0 + 1e-9);
        self.polar.delta() > limit || self.cartesian.delta > limit
    }
}

const BUILTINS: &[(&str, &str)] = &[
    ("two-layer", include_str!("../../../../scenarios/two-layer.toml")),
    ("high-contrast", include_str!("../../../../scenarios/high-contrast.toml")),
    ("square-half", include_str!("../../../../scenarios/square-half.toml")),
    ("square-full", include_str!("../../../../scenarios/square-full.toml")),
    ("arm-like", include_str!("../../../../scenarios/arm-like.toml")),
    ("background", include_str!("../../../../scenarios/background.toml")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{what} must be positive and finite, got {v}")))
    }
}

fn check_material(what: &str, m: &Material) -> Result<()> {
    if !(m.eps_r.is_finite() && m.eps_r > 0.0 && m.sigma.is_finite() && m.sigma >= 0.0) {
        return Err(Error::config(format!("{what}: need eps_r > 0 and sigma ≥ 0, got {m:?}")));
    }
    Ok(())
}

fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read raster file {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::config(format!("{}:{}: not a number: {s:?}", path.display(), line_no + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::config(format!("raster file {} is empty", path.display())));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::config(format!("raster file {} has ragged rows", path.display())));
    }
    rows.reverse();
    Ok(rows)
}

impl ObjectEntry {
    fn into_inclusion(self, base: &Path, index: usize) -> Result<Inclusion> {
        let ctx = |what: &str| format!("object[{index}].{what}");
        match self {
            ObjectEntry::Circle { center, radius, eps_r, sigma } => {
                check_positive(&ctx("radius"), radius)?;
                let m = Material::new(eps_r, sigma);
                check_material(&ctx("material"), &m)?;
                Ok(Inclusion::circle(center, radius, m))
            }
            ObjectEntry::Rectangle { center, size, eps_r, sigma } => {
                check_positive(&ctx("size[0]"), size[0])?;
                check_positive(&ctx("size[1]"), size[1])?;
                let m = Material::new(eps_r, sigma);
                check_material(&ctx("material"), &m)?;
                Ok(Inclusion::rectangle(center, size, m))
            }
            ObjectEntry::Layered { center, radii, eps_r, sigma } => {
                if radii.is_empty() || radii.len() != eps_r.len() {
                    return Err(Error::config(format!("{}: radii and eps_r need equal, nonzero lengths", ctx("layers"))));
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
                    return Err(Error::config(format!("{}: radii must be positive and strictly increasing", ctx("radii"))));
                }
                let sigma = sigma.unwrap_or_else(|| vec![0.0; radii.len()]);
                if sigma.len() != radii.len() {
                    return Err(Error::config(format!("{}: length differs from radii", ctx("sigma"))));
                }
                let layers: Vec<Material> = eps_r.iter().zip(&sigma).map(|(&e, &s)| Material::new(e, s)).collect();
                for (i, m) in layers.iter().enumerate() {
                    check_material(&ctx(&format!("layer[{i}]")), m)?;
                }
                Ok(Inclusion::layered(center, radii, layers))
            }
            ObjectEntry::Raster { origin, cell, file, sigma_file } => {
                check_positive(&ctx("cell"), cell)?;
                let eps = read_matrix(&base.join(file))?;
                let sigma = match sigma_file {
                    Some(f) => Some(read_matrix(&base.join(f))?),
                    None => None,
                };
                if let Some(s) = &sigma {
                    if s.len() != eps.len() || s[0].len() != eps[0].len() {
                        return Err(Error::config(format!("{}: sigma matrix shape differs", ctx("sigma_file"))));
                    }
                }
                let mut cells = Vec::with_capacity(eps.len());
                for (i, row) in eps.iter().enumerate() {
                    let mut out = Vec::with_capacity(row.len());
                    for (j, &e) in row.iter().enumerate() {
                        let s = sigma.as_ref().map_or(0.0, |s| s[i][j]);
                        let m = Material::new(e, s);
                        check_material(&ctx("raster cell"), &m)?;
                        out.push(Some(m));
                    }
                    cells.push(out);
                }
                Ok(Inclusion { shape: Shape::Raster { origin, cell, cells }, material: Material::VACUUM })
            }
        }
    }
}

impl Scenario {
    /// Parse a TOML scenario; relative raster paths resolve against `base`.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::config(format!("scenario: {e}")))?;
        check_positive("frequency", file.frequency)?;
        check_material("background", &file.background)?;
        let scale = match file.units {
            Units::Meter => 1.0,
            Units::Wavelength => free_space_wavelength(file.frequency),
        };
        let mut inclusions = Vec::with_capacity(file.objects.len());
        for (i, obj) in file.objects.into_iter().enumerate() {
            inclusions.push(obj.into_inclusion(base, i)?.scaled(scale));
        }
        let g = file.grid;
        for (what, v) in [("grid.cell", g.cell), ("grid.polar_radius", g.polar_radius)] {
            if let Some(v) = v {
                check_positive(what, v)?;
            }
        }
        let grid = GridSettings {
            cell: g.cell.map(|c| c * scale),
            polar_radius: g.polar_radius.map(|r| r * scale),
            rings: g.rings,
            angles: g.angles,
        };
        let mut observation = file.observation;
        if let Some(r) = observation.radius {
            check_positive("observation.radius", r)?;
            observation.radius = Some(r * scale);
        }
        check_positive("observation.radius_factor", observation.radius_factor)?;
        if observation.samples == 0 {
            return Err(Error::config("observation.samples must be at least 1"));
        }
        check_positive("solver.tol", file.solver.tol)?;
        Ok(Scenario {
            name: file.name.unwrap_or_else(|| "scenario".to_string()),
            frequency: file.frequency,
            background: file.background,
            map: MaterialMap::new(inclusions),
            grid,
            observation,
            solver: file.solver,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read scenario {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn builtin(name: &str) -> Option<Self> {
        let (_, text) = BUILTINS.iter().find(|(n, _)| *n == name)?;
        Some(Self::from_toml_str(text, Path::new(".")).expect("built-in scenarios parse"))
    }

    /// A file path, or the name of a built-in scenario.
    pub fn load(spec: &str) -> Result<Self> {
        let path = Path::new(spec);
        if path.exists() {
            return Self::from_file(path);
        }
        let name = spec.strip_prefix("builtin:").unwrap_or(spec);
        Self::builtin(name).ok_or_else(|| {
            Error::config(format!("no scenario file {spec:?} and no built-in named {name:?} (built-ins: {})", builtin_names().join(", ")))
        })
    }

    /// Same scenario with a different cell size; the ring count and polar
    /// radius are re-derived from it.
    pub fn with_cell(&self, delta: f64) -> Self {
        let mut s = self.clone();
        s.grid.cell = Some(delta);
        s.grid.rings = None;
        s.grid.angles = None;
        s
    }

    pub fn k_b(&self) -> Complex64 {
        wavenumber(&self.background, self.frequency)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let k_b = self.k_b();
        let eps_r_max = self.map.eps_r_max(&self.background);
        let feature = self.map.smallest_feature();
        let delta_max = max_cell_size(eps_r_max, self.frequency, feature);
        let delta = self.grid.cell.unwrap_or(delta_max);
        let extent = self.map.extent_radius();

        let (radius, rings) = match (self.grid.polar_radius, self.grid.rings) {
            (Some(a), Some(m)) => (a, m),
            (Some(a), None) => (a, ((a / delta) - 1e-9).ceil().max(1.0) as usize),
            (None, Some(m)) => {
                if extent == 0.0 {
                    return Err(Error::config("grid.rings without grid.polar_radius needs an object to size the disk"));
                }
                (extent, m)
            }
            (None, None) => {
                if extent == 0.0 {
                    return Err(Error::config("a scenario without objects needs grid.polar_radius"));
                }
                // The rim sits on the object's outer boundary, so no ring
                // straddles it; rings are then at most `delta` thick.
                let m = ((extent / delta) - 1e-9).ceil().max(1.0) as usize;
                (extent, m)
            }
        };
        let polar_delta = radius / rings as f64;
        let angles = self.grid.angles.unwrap_or_else(|| PolarGrid::auto_angles(radius, polar_delta, k_b, eps_r_max));
        let polar = PolarGrid::new(radius, rings, angles)?;

        let bbox = self.map.bounding_box().unwrap_or([-radius, -radius, radius, radius]);
        let cartesian = CartesianGrid::covering(bbox, delta)?;

        let obs_radius = self
            .observation
            .radius
            .unwrap_or(self.observation.radius_factor * if extent > 0.0 { extent } else { radius });
        if obs_radius < radius * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "observation radius {obs_radius:.6} m lies inside the embedding disk of radius {radius:.6} m"
            )));
        }
        let observation = ObservationCircle::new(obs_radius, self.observation.samples)?;

        Ok(Resolved {
            scenario: self.clone(),
            k_b,
            eps_r_max,
            delta_max,
            delta,
            polar,
            cartesian,
            observation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_resolve() {
        for name in builtin_names() {
            let s = Scenario::builtin(name).unwrap();
            let r = s.resolve().unwrap();
            assert!(r.polar.angles.is_power_of_two(), "{name}");
            assert!(r.observation.radius >= r.polar.radius, "{name}");
        }
    }

    #[test]
    fn two_layer_grid() {
        let r = Scenario::builtin("two-layer").unwrap().resolve().unwrap();
        let lambda = free_space_wavelength(1.2e9);
        assert_eq!(r.polar.rings, 8);
        assert!((r.polar.radius - 0.4 * lambda).abs() < 1e-12);
        assert!((r.observation.radius - 1.2 * lambda).abs() < 1e-12);
        assert!(!r.violates_cell_rule());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = Scenario::from_toml_str("frequency = 1e9\nfrequncy = 2", Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = Scenario::from_toml_str(
            "frequency = 1e9\n[[object]]\nshape = \"circle\"\nradius = 0.1\neps_r = 2\ncolour = 1",
            Path::new("."),
        )
        .unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn parse_error_reports_line() {
        let err = Scenario::from_toml_str("frequency = 1e9\n[grid]\ncell = \"x\"\n", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("line 3") || err.to_string().contains("3:"), "{err}");
    }

    #[test]
    fn observation_inside_disk_is_config_error() {
        let text = "frequency = 1e9\n[[object]]\nshape = \"circle\"\nradius = 0.1\neps_r = 2\n[observation]\nradius = 0.05\n";
        let s = Scenario::from_toml_str(text, Path::new(".")).unwrap();
        assert!(matches!(s.resolve(), Err(Error::Config(_))));
    }
}
