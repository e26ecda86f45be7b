//! Deterministic generators for the benchmark meshes.

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::geometry::Point;
use crate::membrane_element::MembraneMaterial;
use crate::model::{Constraint, Dof, Element, ElementKind, Material, MaterialProps, Model, NodalLoad, Node, Settings};
use crate::plate_elements::{PlateMaterial, PlateVariant};

/// Interior-node offsets of the distorted square mesh, as fractions of the
/// cell size, indexed by `(i + 2 j) % 4` of the node's grid position.
pub const DISTORTION_OFFSETS: [(f64, f64); 4] = [(0.15, 0.15), (-0.15, 0.15), (0.15, -0.15), (-0.15, -0.15)];

/// Support condition of one domain edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Free,
    /// `w = 0` only.
    Simple,
    /// `w = 0` and the rotation about the edge normal fixed; axis-aligned edges only.
    SimpleHard,
    Clamped,
}

/// Transverse load as a function of position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlateLoad {
    None,
    Uniform { q0: f64 },
    /// `q0 · x / a`.
    Hydrostatic { q0: f64, a: f64 },
    /// `q0 · sin(π x / a)`.
    SineX { q0: f64, a: f64 },
    /// Linear in `x` from `q_start` at `x = 0` to `q_end` at `x = length`.
    LinearX { q_start: f64, q_end: f64, length: f64 },
}

impl PlateLoad {
    pub fn at(&self, p: Point) -> f64 {
        match *self {
            PlateLoad::None => 0.0,
            PlateLoad::Uniform { q0 } => q0,
            PlateLoad::Hydrostatic { q0, a } => q0 * p.x / a,
            PlateLoad::SineX { q0, a } => q0 * (std::f64::consts::PI * p.x / a).sin(),
            PlateLoad::LinearX { q_start, q_end, length } => q_start + (q_end - q_start) * p.x / length,
        }
    }
}

/// Element type and material shared by the plate generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateSetup {
    pub variant: PlateVariant,
    pub material: PlateMaterial,
    pub quadrature: usize,
    pub load: PlateLoad,
}

impl PlateSetup {
    /// Unit rigidity and unit mass per area.
    pub fn unit(variant: PlateVariant, load: PlateLoad) -> PlateSetup {
        PlateSetup {
            variant,
            material: PlateMaterial::from_rigidity(1.0, 0.3, 0.2, 1.0).expect("valid material"),
            quadrature: 3,
            load,
        }
    }
}

/// Structured grid over a four-sided domain.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    /// Node positions indexed `[j][i]`.
    pub points: Vec<Vec<Point>>,
    /// Number nodes along `y` first (column-major).
    pub column_major: bool,
}

impl Grid {
    /// Bilinear (transfinite) map of the unit square onto `corners`, with
    /// parameter stations `s` along the 0–1 edge and `t` along the 0–3 edge.
    pub fn mapped(corners: [Point; 4], s: &[f64], t: &[f64]) -> Grid {
        let points = t
            .iter()
            .map(|&tv| {
                s.iter()
                    .map(|&sv| {
                        corners[0] * (1.0 - sv) * (1.0 - tv)
                            + corners[1] * sv * (1.0 - tv)
                            + corners[2] * sv * tv
                            + corners[3] * (1.0 - sv) * tv
                    })
                    .collect()
            })
            .collect();
        Grid {
            nx: s.len() - 1,
            ny: t.len() - 1,
            points,
            column_major: false,
        }
    }

    pub fn uniform(corners: [Point; 4], nx: usize, ny: usize) -> Grid {
        Grid::mapped(corners, &stations(nx), &stations(ny))
    }

    pub fn node_id(&self, i: usize, j: usize) -> u64 {
        if self.column_major {
            (i * (self.ny + 1) + j + 1) as u64
        } else {
            (j * (self.nx + 1) + i + 1) as u64
        }
    }

    /// Grid indices of the nodes on edge `k` (0: j = 0, 1: i = nx, 2: j = ny, 3: i = 0).
    pub fn edge_nodes(&self, k: usize) -> Vec<(usize, usize)> {
        match k {
            0 => (0..=self.nx).map(|i| (i, 0)).collect(),
            1 => (0..=self.ny).map(|j| (self.nx, j)).collect(),
            2 => (0..=self.nx).map(|i| (i, self.ny)).collect(),
            _ => (0..=self.ny).map(|j| (0, j)).collect(),
        }
    }

    fn edge_tangent(&self, k: usize) -> Point {
        let e = self.edge_nodes(k);
        let (a, b) = (e[0], e[e.len() - 1]);
        (self.points[b.1][b.0] - self.points[a.1][a.0]).normalize()
    }

    /// Nodes and counter-clockwise quadrilaterals of the grid.
    pub fn into_model(&self, kind: ElementKind, material: &str) -> Model {
        let mut model = Model::default();
        let mut nodes = Vec::with_capacity((self.nx + 1) * (self.ny + 1));
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                let p = self.points[j][i];
                nodes.push(Node {
                    id: self.node_id(i, j),
                    x: p.x,
                    y: p.y,
                    z: 0.0,
                });
            }
        }
        nodes.sort_by_key(|n| n.id);
        model.nodes = nodes;
        let mut id = 1;
        for j in 0..self.ny {
            for i in 0..self.nx {
                model.elements.push(Element::new(
                    id,
                    kind,
                    vec![
                        self.node_id(i, j),
                        self.node_id(i + 1, j),
                        self.node_id(i + 1, j + 1),
                        self.node_id(i, j + 1),
                    ],
                    material,
                ));
                id += 1;
            }
        }
        model
    }
}

fn stations(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn check_count(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(FemError::InvalidArgument(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(FemError::InvalidArgument(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn support_constraints(support: Support, tangent: Point) -> Result<Vec<Dof>> {
    Ok(match support {
        Support::Free => vec![],
        Support::Simple => vec![Dof::Uz],
        Support::Clamped => vec![Dof::Uz, Dof::Rx, Dof::Ry],
        Support::SimpleHard => {
            // The rotation about the in-plane edge normal is fixed.
            if tangent.y.abs() < 1e-12 {
                vec![Dof::Uz, Dof::Ry]
            } else if tangent.x.abs() < 1e-12 {
                vec![Dof::Uz, Dof::Rx]
            } else {
                return Err(FemError::InvalidArgument(
                    "hard simple support needs an axis-aligned edge".into(),
                ));
            }
        }
    })
}

/// Adds support constraints, merging duplicates at shared corners.
fn constrain(model: &mut Model, node: u64, dofs: &[Dof]) {
    for d in dofs {
        if !model.constraints.iter().any(|c| c.node == node && c.dof == *d) {
            model.constraints.push(Constraint {
                node,
                dof: *d,
                value: 0.0,
            });
        }
    }
}

/// Plate model over a grid with supports per edge (bottom, right, top, left).
pub fn plate_model(grid: &Grid, setup: &PlateSetup, supports: [Support; 4]) -> Result<Model> {
    setup.material.validate()?;
    let mut model = grid.into_model(ElementKind::from_variant(setup.variant), "plate");
    model.settings = Settings {
        quadrature: setup.quadrature,
    };
    model.materials.push(Material {
        id: "plate".into(),
        props: MaterialProps::Plate(setup.material),
    });
    let pos: std::collections::HashMap<u64, Point> =
        model.nodes.iter().map(|n| (n.id, Point::new(n.x, n.y))).collect();
    if setup.load != PlateLoad::None {
        for e in &mut model.elements {
            let mut q = [0.0; 4];
            for (k, id) in e.nodes.iter().enumerate() {
                q[k] = setup.load.at(pos[id]);
            }
            e.pressure = Some(q);
        }
    }
    for (k, s) in supports.iter().enumerate() {
        let dofs = support_constraints(*s, grid.edge_tangent(k))?;
        for (i, j) in grid.edge_nodes(k) {
            constrain(&mut model, grid.node_id(i, j), &dofs);
        }
    }
    model.constraints.sort_by_key(|c| (c.node, c.dof));
    Ok(model)
}

fn square_corners(ax: f64, ay: f64) -> [Point; 4] {
    [Point::new(0.0, 0.0), Point::new(ax, 0.0), Point::new(ax, ay), Point::new(0.0, ay)]
}

/// `n × n` grid over an `a × a` square, optionally with fixed interior distortion.
pub fn square_grid(a: f64, n: usize, distorted: bool) -> Result<Grid> {
    check_positive("a", a)?;
    check_count("n", n)?;
    let mut grid = Grid::uniform(square_corners(a, a), n, n);
    if distorted {
        let h = a / n as f64;
        for j in 1..n {
            for i in 1..n {
                // The centre node stays put so that it remains the measuring point.
                if 2 * i == n && 2 * j == n {
                    continue;
                }
                let (dx, dy) = DISTORTION_OFFSETS[(i + 2 * j) % 4];
                grid.points[j][i] += Point::new(dx * h, dy * h);
            }
        }
    }
    Ok(grid)
}

pub fn square_mesh(a: f64, n: usize, distorted: bool, setup: &PlateSetup, supports: [Support; 4]) -> Result<Model> {
    plate_model(&square_grid(a, n, distorted)?, setup, supports)
}

pub fn rect_mesh(ax: f64, ay: f64, nx: usize, ny: usize, setup: &PlateSetup, supports: [Support; 4]) -> Result<Model> {
    check_positive("a", ax)?;
    check_positive("b", ay)?;
    check_count("nx", nx)?;
    check_count("ny", ny)?;
    plate_model(&Grid::uniform(square_corners(ax, ay), nx, ny), setup, supports)
}

/// Rhombus of side `a` whose sides `0–3` lean by `skew_deg` from the `y` axis.
pub fn rhombic_grid(a: f64, n: usize, skew_deg: f64) -> Result<Grid> {
    check_positive("a", a)?;
    check_count("n", n)?;
    if !(0.0..90.0).contains(&skew_deg) {
        return Err(FemError::InvalidArgument(format!("skew angle {skew_deg} outside [0, 90)")));
    }
    let s = skew_deg.to_radians();
    let side = Point::new(a * s.sin(), a * s.cos());
    let corners = [Point::new(0.0, 0.0), Point::new(a, 0.0), Point::new(a, 0.0) + side, side];
    Ok(Grid::uniform(corners, n, n))
}

pub fn rhombic_mesh(a: f64, n: usize, skew_deg: f64, setup: &PlateSetup, support: Support) -> Result<Model> {
    plate_model(&rhombic_grid(a, n, skew_deg)?, setup, [support; 4])
}

/// Plan form of a cantilevered trapezoid: clamped root along `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub length: f64,
    pub root: f64,
    pub tip: f64,
    /// Taper on both long sides instead of only the upper one.
    pub symmetric: bool,
}

impl Trapezoid {
    /// Root and length `a`, one or both long sides inclined by `angle_deg`.
    pub fn tapered(a: f64, angle_deg: f64, symmetric: bool) -> Trapezoid {
        let cut = a * angle_deg.to_radians().tan();
        Trapezoid {
            length: a,
            root: a,
            tip: a - if symmetric { 2.0 * cut } else { cut },
            symmetric,
        }
    }

    pub fn corners(&self) -> [Point; 4] {
        let y0 = if self.symmetric { 0.5 * (self.root - self.tip) } else { 0.0 };
        [
            Point::new(0.0, 0.0),
            Point::new(self.length, y0),
            Point::new(self.length, y0 + self.tip),
            Point::new(0.0, self.root),
        ]
    }
}

pub fn trapezoid_mesh(shape: Trapezoid, n: usize, setup: &PlateSetup) -> Result<Model> {
    check_positive("length", shape.length)?;
    check_positive("root", shape.root)?;
    check_positive("tip", shape.tip)?;
    check_count("n", n)?;
    let grid = Grid::uniform(shape.corners(), n, n);
    plate_model(&grid, setup, [Support::Free, Support::Free, Support::Free, Support::Clamped])
}

/// Cantilevered strip `L × h` of `n_l × n_h` elements clamped at `x = 0`.
///
/// With `ratio > 1` the element lengths grow geometrically from the root so
/// that the longest is `ratio` times the shortest.
pub fn strip_grid(l: f64, h: f64, n_l: usize, n_h: usize, ratio: f64) -> Result<Grid> {
    check_positive("L", l)?;
    check_positive("h", h)?;
    check_count("n_l", n_l)?;
    check_count("n_h", n_h)?;
    if !(ratio >= 1.0) {
        return Err(FemError::InvalidArgument(format!("distortion ratio {ratio} below 1")));
    }
    let growth = if n_l > 1 { ratio.powf(1.0 / (n_l - 1) as f64) } else { 1.0 };
    let weights: Vec<f64> = (0..n_l).map(|k| growth.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut stations = vec![0.0];
    for w in &weights {
        stations.push(stations.last().expect("nonempty") + l * w / total);
    }
    *stations.last_mut().expect("nonempty") = l;
    let points = (0..=n_h)
        .map(|j| {
            let t = j as f64 / n_h as f64;
            (0..=n_l)
                .map(|i| Point::new(stations[i], h * t))
                .collect()
        })
        .collect();
    Ok(Grid {
        nx: n_l,
        ny: n_h,
        points,
        column_major: true,
    })
}

/// Plate strip clamped at `x = 0` with tip load `p` shared by the tip nodes.
pub fn strip_mesh(l: f64, h: f64, n_l: usize, n_h: usize, ratio: f64, p: f64, setup: &PlateSetup) -> Result<Model> {
    let grid = strip_grid(l, h, n_l, n_h, ratio)?;
    let mut model = plate_model(&grid, setup, [Support::Free, Support::Free, Support::Free, Support::Clamped])?;
    let tip = grid.edge_nodes(1);
    let share = edge_shares(&grid, &tip);
    for ((i, j), s) in tip.iter().zip(share) {
        model.loads.push(NodalLoad {
            node: grid.node_id(*i, *j),
            dof: Dof::Uz,
            value: p * s,
        });
    }
    Ok(model)
}

/// Tributary-length fractions of a uniform line load along an edge.
fn edge_shares(grid: &Grid, nodes: &[(usize, usize)]) -> Vec<f64> {
    let pts: Vec<Point> = nodes.iter().map(|(i, j)| grid.points[*j][*i]).collect();
    let total: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let mut s = vec![0.0; pts.len()];
    for (k, w) in pts.windows(2).enumerate() {
        let half = 0.5 * (w[1] - w[0]).norm() / total;
        s[k] += half;
        s[k + 1] += half;
    }
    s
}

/// Membrane material, thickness and quadrature for the plane-stress generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneSetup {
    pub material: MembraneMaterial,
    pub quadrature: usize,
}

fn membrane_model(grid: &Grid, setup: &MembraneSetup) -> Result<Model> {
    setup.material.validate()?;
    let mut model = grid.into_model(ElementKind::Membrane, "membrane");
    model.settings = Settings {
        quadrature: setup.quadrature,
    };
    model.materials.push(Material {
        id: "membrane".into(),
        props: MaterialProps::Membrane(setup.material),
    });
    Ok(model)
}

/// Clamps translations and drilling rotations on grid edge `k`.
fn clamp_membrane_edge(model: &mut Model, grid: &Grid, k: usize) {
    for (i, j) in grid.edge_nodes(k) {
        constrain(model, grid.node_id(i, j), &[Dof::Ux, Dof::Uy, Dof::Rz]);
    }
    model.constraints.sort_by_key(|c| (c.node, c.dof));
}

/// Plane-stress cantilever `l × h` clamped at `x = 0`, parabolic tip shear `p`.
pub fn membrane_beam(l: f64, h: f64, n_l: usize, n_h: usize, p: f64, setup: &MembraneSetup) -> Result<Model> {
    check_positive("L", l)?;
    check_positive("h", h)?;
    check_count("n_l", n_l)?;
    check_count("n_h", n_h)?;
    let mut grid = Grid::uniform(
        [Point::new(0.0, -0.5 * h), Point::new(l, -0.5 * h), Point::new(l, 0.5 * h), Point::new(0.0, 0.5 * h)],
        n_l,
        n_h,
    );
    grid.column_major = true;
    let mut model = membrane_model(&grid, setup)?;
    clamp_membrane_edge(&mut model, &grid, 3);
    // Consistent nodal forces of τ = 3P/(2h) (1 − 4y²/h²) with linear edge shapes.
    let tip = grid.edge_nodes(1);
    let ys: Vec<f64> = tip.iter().map(|(i, j)| grid.points[*j][*i].y).collect();
    let tau = |y: f64| 1.5 * p / h * (1.0 - 4.0 * y * y / (h * h));
    let rule = crate::geometry::gauss_rule(3)?;
    let mut f = vec![0.0; ys.len()];
    for k in 0..ys.len() - 1 {
        let (ya, yb) = (ys[k], ys[k + 1]);
        for (xi, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = 0.5 * (xi + 1.0);
            let y = ya + s * (yb - ya);
            let v = tau(y) * w * 0.5 * (yb - ya);
            f[k] += v * (1.0 - s);
            f[k + 1] += v * s;
        }
    }
    for ((i, j), v) in tip.iter().zip(f) {
        model.loads.push(NodalLoad {
            node: grid.node_id(*i, *j),
            dof: Dof::Uy,
            value: v,
        });
    }
    Ok(model)
}

/// Cook's tapered panel, `n × n`, clamped at `x = 0`, total shear `p` on the
/// free edge split equally between its nodes.
pub fn cook_mesh(n: usize, p: f64, setup: &MembraneSetup) -> Result<Model> {
    check_count("n", n)?;
    let corners = [Point::new(0.0, 0.0), Point::new(48.0, 44.0), Point::new(48.0, 60.0), Point::new(0.0, 44.0)];
    let mut grid = Grid::uniform(corners, n, n);
    grid.column_major = true;
    let mut model = membrane_model(&grid, setup)?;
    clamp_membrane_edge(&mut model, &grid, 3);
    let tip = grid.edge_nodes(1);
    let share = p / tip.len() as f64;
    for (i, j) in tip {
        model.loads.push(NodalLoad {
            node: grid.node_id(i, j),
            dof: Dof::Uy,
            value: share,
        });
    }
    Ok(model)
}

/// Clamped circular plate of radius `r`.
///
/// A centre node and the first ring of `sectors` nodes form `sectors / 2`
/// kite-shaped core elements; every further ring carries `sectors` elements.
pub fn circular_mesh(r: f64, rings: usize, sectors: usize, setup: &PlateSetup) -> Result<Model> {
    check_positive("R", r)?;
    if rings < 2 || sectors < 4 || sectors % 2 != 0 {
        return Err(FemError::InvalidArgument(format!(
            "circular mesh needs rings >= 2 and an even sector count >= 4, got {rings} x {sectors}"
        )));
    }
    let mut model = Model {
        settings: Settings {
            quadrature: setup.quadrature,
        },
        ..Model::default()
    };
    model.materials.push(Material {
        id: "plate".into(),
        props: MaterialProps::Plate(setup.material),
    });
    let kind = ElementKind::from_variant(setup.variant);
    let node = |ring: usize, k: usize| -> u64 {
        if ring == 0 {
            1
        } else {
            (2 + (ring - 1) * sectors + k % sectors) as u64
        }
    };
    model.nodes.push(Node {
        id: 1,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    });
    for ring in 1..=rings {
        let rad = r * ring as f64 / rings as f64;
        for k in 0..sectors {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / sectors as f64;
            model.nodes.push(Node {
                id: node(ring, k),
                x: rad * phi.cos(),
                y: rad * phi.sin(),
                z: 0.0,
            });
        }
    }
    let mut id = 1;
    let mut push = |model: &mut Model, nodes: Vec<u64>| {
        model.elements.push(Element::new(id, kind, nodes, "plate"));
        id += 1;
    };
    for k in (0..sectors).step_by(2) {
        push(&mut model, vec![node(0, 0), node(1, k), node(1, k + 1), node(1, k + 2)]);
    }
    for ring in 1..rings {
        for k in 0..sectors {
            push(&mut model, vec![node(ring, k), node(ring + 1, k), node(ring + 1, k + 1), node(ring, k + 1)]);
        }
    }
    let pos: std::collections::HashMap<u64, Point> =
        model.nodes.iter().map(|n| (n.id, Point::new(n.x, n.y))).collect();
    if setup.load != PlateLoad::None {
        for e in &mut model.elements {
            let mut q = [0.0; 4];
            for (k, nid) in e.nodes.iter().enumerate() {
                q[k] = setup.load.at(pos[nid]);
            }
            e.pressure = Some(q);
        }
    }
    for k in 0..sectors {
        constrain(&mut model, node(rings, k), &[Dof::Uz, Dof::Rx, Dof::Ry]);
    }
    model.constraints.sort_by_key(|c| (c.node, c.dof));
    Ok(model)
}

/// Serializable description of a generated mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum MeshSpec {
    Square {
        a: f64,
        n: usize,
        #[serde(default)]
        distorted: bool,
        supports: [Support; 4],
        setup: PlateSetup,
    },
    Rect {
        a: f64,
        b: f64,
        nx: usize,
        ny: usize,
        supports: [Support; 4],
        setup: PlateSetup,
    },
    Rhombic {
        a: f64,
        n: usize,
        skew_deg: f64,
        support: Support,
        setup: PlateSetup,
    },
    Circular {
        r: f64,
        rings: usize,
        sectors: usize,
        setup: PlateSetup,
    },
    Trapezoid {
        shape: Trapezoid,
        n: usize,
        setup: PlateSetup,
    },
    Strip {
        l: f64,
        h: f64,
        n_l: usize,
        n_h: usize,
        ratio: f64,
        p: f64,
        setup: PlateSetup,
    },
    MembraneBeam {
        l: f64,
        h: f64,
        n_l: usize,
        n_h: usize,
        p: f64,
        setup: MembraneSetup,
    },
    Cook {
        n: usize,
        p: f64,
        setup: MembraneSetup,
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<Model> {
        let mut model = match self {
            MeshSpec::Square {
                a,
                n,
                distorted,
                supports,
                setup,
            } => square_mesh(*a, *n, *distorted, setup, *supports)?,
            MeshSpec::Rect {
                a,
                b,
                nx,
                ny,
                supports,
                setup,
            } => rect_mesh(*a, *b, *nx, *ny, setup, *supports)?,
            MeshSpec::Rhombic {
                a,
                n,
                skew_deg,
                support,
                setup,
            } => rhombic_mesh(*a, *n, *skew_deg, setup, *support)?,
            MeshSpec::Circular { r, rings, sectors, setup } => circular_mesh(*r, *rings, *sectors, setup)?,
            MeshSpec::Trapezoid { shape, n, setup } => trapezoid_mesh(*shape, *n, setup)?,
            MeshSpec::Strip {
                l,
                h,
                n_l,
                n_h,
                ratio,
                p,
                setup,
            } => strip_mesh(*l, *h, *n_l, *n_h, *ratio, *p, setup)?,
            MeshSpec::MembraneBeam {
                l,
                h,
                n_l,
                n_h,
                p,
                setup,
            } => membrane_beam(*l, *h, *n_l, *n_h, *p, setup)?,
            MeshSpec::Cook { n, p, setup } => cook_mesh(*n, *p, setup)?,
        };
        model.name = self.name();
        Ok(model)
    }

    pub fn name(&self) -> String {
        match self {
            MeshSpec::Square { n, distorted, .. } => {
                format!("square {n}x{n}{}", if *distorted { " distorted" } else { "" })
            }
            MeshSpec::Rect { nx, ny, .. } => format!("rect {nx}x{ny}"),
            MeshSpec::Rhombic { n, skew_deg, .. } => format!("rhombic {n}x{n} skew {skew_deg}"),
            MeshSpec::Circular { rings, sectors, .. } => format!("circular {rings}x{sectors}"),
            MeshSpec::Trapezoid { n, .. } => format!("trapezoid {n}x{n}"),
            MeshSpec::Strip { n_l, n_h, ratio, .. } => format!("strip {n_l}x{n_h} ratio {ratio}"),
            MeshSpec::MembraneBeam { n_l, n_h, .. } => format!("membrane beam {n_l}x{n_h}"),
            MeshSpec::Cook { n, .. } => format!("cook {n}x{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{isoparametric_eval, Quadrature, QuadCorners};

    fn setup() -> PlateSetup {
        PlateSetup::unit(PlateVariant::Zdeq, PlateLoad::Uniform { q0: 1.0 })
    }

    fn cells(model: &Model) -> Vec<QuadCorners> {
        let idx = model.node_index();
        model
            .elements
            .iter()
            .map(|e| {
                let mut p = [Point::zeros(); 4];
                for (k, id) in e.nodes.iter().enumerate() {
                    let n = &model.nodes[idx[id]];
                    p[k] = Point::new(n.x, n.y);
                }
                QuadCorners { pts: p }
            })
            .collect()
    }

    fn assert_valid_cells(model: &Model) {
        let rule = Quadrature::GAUSS3.rule();
        for c in cells(model) {
            assert!(c.signed_area() > 0.0);
            assert!(c.is_convex());
            for (t, _) in rule.square_points() {
                assert!(isoparametric_eval(&c, t).det > 0.0);
            }
        }
    }

    #[test]
    fn square_counts_and_support() {
        let m = square_mesh(1.0, 2, false, &setup(), [Support::Simple; 4]).unwrap();
        assert_eq!(m.nodes.len(), 9);
        assert_eq!(m.elements.len(), 4);
        for c in cells(&m) {
            assert!((c.signed_area() - 0.25).abs() < 1e-15);
        }
        let m = square_mesh(1.0, 4, false, &setup(), [Support::Simple; 4]).unwrap();
        assert_eq!(m.constraints.len(), 16);
        let m = square_mesh(1.0, 4, false, &setup(), [Support::Clamped; 4]).unwrap();
        assert_eq!(m.constraints.len(), 48);
    }

    #[test]
    fn hard_support_needs_axis_aligned_edges() {
        let m = square_mesh(1.0, 2, false, &setup(), [Support::SimpleHard; 4]).unwrap();
        // Eight boundary w plus one tangential rotation per edge node (corners get both).
        assert_eq!(m.constraints.len(), 8 + 12);
        assert!(rhombic_mesh(1.0, 2, 30.0, &setup(), Support::SimpleHard).is_err());
    }

    #[test]
    fn distorted_square_cells_are_valid() {
        let m = square_mesh(1.0, 4, true, &setup(), [Support::Simple; 4]).unwrap();
        assert_valid_cells(&m);
        let centre = m.nodes.iter().find(|n| n.id == 13).unwrap();
        assert_eq!((centre.x, centre.y), (0.5, 0.5));
        let total: f64 = cells(&m).iter().map(|c| c.signed_area()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rhombic_limits_and_areas() {
        let a = rhombic_mesh(2.0, 3, 0.0, &setup(), Support::Simple).unwrap();
        let b = square_mesh(2.0, 3, false, &setup(), [Support::Simple; 4]).unwrap();
        for (p, q) in a.nodes.iter().zip(&b.nodes) {
            assert!((p.x - q.x).abs() < 1e-15 && (p.y - q.y).abs() < 1e-15);
        }
        let m = rhombic_mesh(2.0, 4, 60.0, &setup(), Support::Simple).unwrap();
        let expect = (2.0f64 / 4.0).powi(2) * 60f64.to_radians().cos();
        for c in cells(&m) {
            assert!((c.signed_area() - expect).abs() < 1e-14);
        }
        assert!(rhombic_grid(1.0, 2, 90.0).is_err());
    }

    #[test]
    fn refinement_nests() {
        for (coarse, fine) in [
            (square_grid(1.0, 3, false).unwrap(), square_grid(1.0, 6, false).unwrap()),
            (rhombic_grid(1.0, 3, 30.0).unwrap(), rhombic_grid(1.0, 6, 30.0).unwrap()),
        ] {
            for j in 0..=3 {
                for i in 0..=3 {
                    assert!((coarse.points[j][i] - fine.points[2 * j][2 * i]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn circular_mesh_topology() {
        let m = circular_mesh(1.0, 3, 12, &setup()).unwrap();
        assert_valid_cells(&m);
        assert_eq!(m.nodes.len(), 1 + 3 * 12);
        assert_eq!(m.elements.len(), 6 + 2 * 12);
        assert_eq!(m.constraints.len(), 36);
        assert!(circular_mesh(1.0, 1, 12, &setup()).is_err());
        assert!(circular_mesh(1.0, 3, 11, &setup()).is_err());
    }

    #[test]
    fn cook_counts_and_load() {
        let s = MembraneSetup {
            material: MembraneMaterial {
                e: 1.0,
                nu: 1.0 / 3.0,
                t: 1.0,
                rho: 0.0,
            },
            quadrature: 3,
        };
        let m = cook_mesh(4, 1.0, &s).unwrap();
        assert_eq!(m.nodes.len(), 25);
        assert_eq!(m.elements.len(), 16);
        assert_valid_cells(&m);
        let ids: Vec<u64> = m.loads.iter().map(|l| l.node).collect();
        assert_eq!(ids, vec![21, 22, 23, 24, 25]);
        let total: f64 = m.loads.iter().map(|l| l.value).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn membrane_beam_load_resultant() {
        let s = MembraneSetup {
            material: MembraneMaterial {
                e: 30000.0,
                nu: 0.25,
                t: 1.0,
                rho: 0.0,
            },
            quadrature: 3,
        };
        let m = membrane_beam(48.0, 12.0, 16, 4, 40.0, &s).unwrap();
        let ids: Vec<u64> = m.loads.iter().map(|l| l.node).collect();
        assert_eq!(ids, vec![81, 82, 83, 84, 85]);
        let total: f64 = m.loads.iter().map(|l| l.value).sum();
        assert!((total - 40.0).abs() < 1e-12);
        assert!((m.loads[0].value - m.loads[4].value).abs() < 1e-12);
    }

    #[test]
    fn strip_lengths_sum_to_l() {
        for ratio in [1.0, 5.0] {
            let g = strip_grid(0.9, 0.2, 6, 1, ratio).unwrap();
            let len: f64 = (0..6).map(|i| g.points[0][i + 1].x - g.points[0][i].x).sum();
            let lens: Vec<f64> = (0..6).map(|i| g.points[1][i + 1].x - g.points[1][i].x).collect();
            assert!((len - 0.9).abs() < 1e-15);
            assert!((lens[5] / lens[0] - ratio).abs() < 1e-12);
            for w in lens.windows(2) {
                assert!(w[1] >= w[0] - 1e-15);
            }
        }
        assert!(strip_grid(0.9, 0.2, 6, 1, 0.5).is_err());
    }

    #[test]
    fn trapezoid_presets() {
        let t = Trapezoid::tapered(1.0, 18.0, true);
        assert!((t.tip - (1.0 - 2.0 * 18f64.to_radians().tan())).abs() < 1e-15);
        for sym in [false, true] {
            for ang in [6.0, 9.0, 24.0, 36.0] {
                if sym && ang > 30.0 {
                    continue;
                }
                let m = trapezoid_mesh(Trapezoid::tapered(1.0, ang, sym), 4, &setup()).unwrap();
                assert_valid_cells(&m);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = MeshSpec::Rhombic {
            a: 1.0,
            n: 4,
            skew_deg: 60.0,
            support: Support::Simple,
            setup: setup(),
        };
        assert_eq!(spec.build().unwrap().to_json(), spec.build().unwrap().to_json());
        let text = serde_json::to_string(&spec).unwrap();
        let back: MeshSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
