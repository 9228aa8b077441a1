use serde::{Deserialize, Serialize};

use super::Material;

/// Geometric support of an inclusion. Lengths are in meters once a scenario
/// is resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum Shape {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Rectangle {
        center: [f64; 2],
        size: [f64; 2],
    },
    /// Concentric disks; `radii` ascending, layer `i` spans
    /// `radii[i-1] < ρ ≤ radii[i]` with its own material.
    Layered {
        center: [f64; 2],
        radii: Vec<f64>,
        layers: Vec<Material>,
    },
    /// Nearest-neighbour lookup into a row-major grid of materials. Row 0 is
    /// the bottom row (smallest y), column 0 the leftmost; `origin` is the
    /// lower-left corner and `None` cells are background.
    Raster {
        origin: [f64; 2],
        cell: f64,
        cells: Vec<Vec<Option<Material>>>,
    },
}

/// A shape filled with a material. Layered and raster shapes carry their
/// own materials and ignore `material`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inclusion {
    pub shape: Shape,
    pub material: Material,
}

impl Inclusion {
    pub fn circle(center: [f64; 2], radius: f64, material: Material) -> Self {
        Self { shape: Shape::Circle { center, radius }, material }
    }

    pub fn rectangle(center: [f64; 2], size: [f64; 2], material: Material) -> Self {
        Self { shape: Shape::Rectangle { center, size }, material }
    }

    pub fn layered(center: [f64; 2], radii: Vec<f64>, layers: Vec<Material>) -> Self {
        Self { shape: Shape::Layered { center, radii, layers }, material: Material::VACUUM }
    }

    pub fn material_at(&self, p: [f64; 2]) -> Option<Material> {
        match &self.shape {
            Shape::Circle { center, radius } => (dist(p, *center) <= *radius).then_some(self.material),
            Shape::Rectangle { center, size } => {
                let inside = (p[0] - center[0]).abs() <= 0.5 * size[0] && (p[1] - center[1]).abs() <= 0.5 * size[1];
                inside.then_some(self.material)
            }
            Shape::Layered { center, radii, layers } => {
                let r = dist(p, *center);
                radii.iter().position(|&edge| r <= edge).map(|i| layers[i])
            }
            Shape::Raster { origin, cell, cells } => {
                let fx = (p[0] - origin[0]) / cell;
                let fy = (p[1] - origin[1]) / cell;
                if fx < 0.0 || fy < 0.0 {
                    return None;
                }
                let row = cells.get(fy as usize)?;
                *row.get(fx as usize)?
            }
        }
    }

    /// Largest distance from the origin to any point of the support.
    pub fn extent_radius(&self) -> f64 {
        match &self.shape {
            Shape::Circle { center, radius } => dist(*center, [0.0, 0.0]) + radius,
            Shape::Layered { center, radii, .. } => dist(*center, [0.0, 0.0]) + radii.last().copied().unwrap_or(0.0),
            _ => {
                let [x0, y0, x1, y1] = self.bounding_box();
                [[x0, y0], [x0, y1], [x1, y0], [x1, y1]].iter().map(|c| dist(*c, [0.0, 0.0])).fold(0.0, f64::max)
            }
        }
    }

    /// `[xmin, ymin, xmax, ymax]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        match &self.shape {
            Shape::Circle { center, radius } => {
                [center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius]
            }
            Shape::Rectangle { center, size } => [
                center[0] - 0.5 * size[0],
                center[1] - 0.5 * size[1],
                center[0] + 0.5 * size[0],
                center[1] + 0.5 * size[1],
            ],
            Shape::Layered { center, radii, .. } => {
                let r = radii.last().copied().unwrap_or(0.0);
                [center[0] - r, center[1] - r, center[0] + r, center[1] + r]
            }
            Shape::Raster { origin, cell, cells } => {
                let rows = cells.len() as f64;
                let cols = cells.iter().map(Vec::len).max().unwrap_or(0) as f64;
                [origin[0], origin[1], origin[0] + cols * cell, origin[1] + rows * cell]
            }
        }
    }

    /// Smallest characteristic length (diameter, side, layer thickness or
    /// raster cell) used by the cell-size rule.
    pub fn smallest_feature(&self) -> f64 {
        match &self.shape {
            Shape::Circle { radius, .. } => 2.0 * radius,
            Shape::Rectangle { size, .. } => size[0].min(size[1]),
            Shape::Layered { radii, .. } => {
                let mut prev = 0.0;
                let mut best = f64::INFINITY;
                for (i, &r) in radii.iter().enumerate() {
                    let t = if i == 0 { 2.0 * r } else { r - prev };
                    best = best.min(t);
                    prev = r;
                }
                best
            }
            Shape::Raster { cell, .. } => *cell,
        }
    }

    pub fn materials(&self) -> Vec<Material> {
        match &self.shape {
            Shape::Layered { layers, .. } => layers.clone(),
            Shape::Raster { cells, .. } => cells.iter().flatten().flatten().copied().collect(),
            _ => vec![self.material],
        }
    }

    pub(crate) fn scaled(&self, s: f64) -> Inclusion {
        let sc = |p: [f64; 2]| [p[0] * s, p[1] * s];
        let shape = match &self.shape {
            Shape::Circle { center, radius } => Shape::Circle { center: sc(*center), radius: radius * s },
            Shape::Rectangle { center, size } => Shape::Rectangle { center: sc(*center), size: sc(*size) },
            Shape::Layered { center, radii, layers } => Shape::Layered {
                center: sc(*center),
                radii: radii.iter().map(|r| r * s).collect(),
                layers: layers.clone(),
            },
            Shape::Raster { origin, cell, cells } => {
                Shape::Raster { origin: sc(*origin), cell: cell * s, cells: cells.clone() }
            }
        };
        Inclusion { shape, material: self.material }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Inclusions painted in order; later entries override earlier ones where
/// they overlap.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaterialMap {
    pub inclusions: Vec<Inclusion>,
}

impl MaterialMap {
    pub fn new(inclusions: Vec<Inclusion>) -> Self {
        Self { inclusions }
    }

    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    pub fn material_at(&self, p: [f64; 2]) -> Option<Material> {
        self.inclusions.iter().rev().find_map(|inc| inc.material_at(p))
    }

    pub fn extent_radius(&self) -> f64 {
        self.inclusions.iter().map(Inclusion::extent_radius).fold(0.0, f64::max)
    }

    pub fn bounding_box(&self) -> Option<[f64; 4]> {
        self.inclusions.iter().map(Inclusion::bounding_box).reduce(|a, b| {
            [a[0].min(b[0]), a[1].min(b[1]), a[2].max(b[2]), a[3].max(b[3])]
        })
    }

    pub fn smallest_feature(&self) -> f64 {
        self.inclusions.iter().map(Inclusion::smallest_feature).fold(f64::INFINITY, f64::min)
    }

    pub fn eps_r_max(&self, background: &Material) -> f64 {
        self.inclusions.iter().flat_map(Inclusion::materials).map(|m| m.eps_r).fold(background.eps_r, f64::max)
    }

    /// Concentric layers centred at the origin, if the map is exactly one
    /// such object (or one origin-centred circle).
    pub fn as_concentric(&self) -> Option<(Vec<f64>, Vec<Material>)> {
        match self.inclusions.as_slice() {
            [inc] => match &inc.shape {
                Shape::Layered { center, radii, layers } if *center == [0.0, 0.0] => {
                    Some((radii.clone(), layers.clone()))
                }
                Shape::Circle { center, radius } if *center == [0.0, 0.0] => Some((vec![*radius], vec![inc.material])),
                _ => None,
            },
            _ => None,
        }
    }
}
