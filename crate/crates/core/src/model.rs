//! Model container, DOF numbering, element computation and global assembly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::frame_element::{FrameElement, FrameLoads, FrameSection};
use crate::geometry::{Point, QuadCorners, Quadrature};
use crate::membrane_element::{MembraneElement, MembraneMaterial};
use crate::plate_elements::{PlateElement, PlateMaterial, PlateVariant};

pub const MODEL_SCHEMA: &str = "trefftz-fem/model-v1";

/// Systems with more free DOFs than this use skyline storage.
pub const DENSE_LIMIT: usize = 3000;

/// Global DOF slots per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dof {
    Ux,
    Uy,
    Uz,
    Rx,
    Ry,
    Rz,
}

impl Dof {
    pub const ALL: [Dof; 6] = [Dof::Ux, Dof::Uy, Dof::Uz, Dof::Rx, Dof::Ry, Dof::Rz];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["ux", "uy", "uz", "rx", "ry", "rz"][self.slot()]
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dof {
    type Err = FemError;
    fn from_str(s: &str) -> Result<Self> {
        Dof::ALL
            .into_iter()
            .find(|d| d.name() == s.to_ascii_lowercase())
            .ok_or_else(|| FemError::InvalidArgument(format!("unknown dof '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Zdeq,
    Tfeq,
    Jfeq,
    Membrane,
    Frame,
}

impl ElementKind {
    pub fn plate_variant(self) -> Option<PlateVariant> {
        match self {
            ElementKind::Zdeq => Some(PlateVariant::Zdeq),
            ElementKind::Tfeq => Some(PlateVariant::Tfeq),
            ElementKind::Jfeq => Some(PlateVariant::Jfeq),
            _ => None,
        }
    }

    pub fn from_variant(v: PlateVariant) -> Self {
        match v {
            PlateVariant::Zdeq => ElementKind::Zdeq,
            PlateVariant::Tfeq => ElementKind::Tfeq,
            PlateVariant::Jfeq => ElementKind::Jfeq,
        }
    }

    /// Global DOF slots the element couples at each of its nodes.
    pub fn slots(self) -> &'static [Dof] {
        match self {
            ElementKind::Zdeq | ElementKind::Tfeq | ElementKind::Jfeq => &[Dof::Uz, Dof::Rx, Dof::Ry],
            ElementKind::Membrane => &[Dof::Ux, Dof::Uy, Dof::Rz],
            ElementKind::Frame => &Dof::ALL,
        }
    }

    pub fn node_count(self) -> usize {
        if self == ElementKind::Frame {
            2
        } else {
            4
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MaterialProps {
    Plate(PlateMaterial),
    Membrane(MembraneMaterial),
    Frame(FrameSection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub id: String,
    #[serde(flatten)]
    pub props: MaterialProps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: u64,
    pub kind: ElementKind,
    pub nodes: Vec<u64>,
    pub material: String,
    /// Plate pressure intensities at the four corner nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure: Option<[f64; 4]>,
    /// Membrane body force per unit area in global axes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_force: Option<[f64; 2]>,
    /// Frame member loads in local axes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_loads: Option<FrameLoads>,
    /// Vector fixing the frame's local axis 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<[f64; 3]>,
}

impl Element {
    pub fn new(id: u64, kind: ElementKind, nodes: Vec<u64>, material: &str) -> Self {
        Element {
            id,
            kind,
            nodes,
            material: material.to_string(),
            pressure: None,
            body_force: None,
            frame_loads: None,
            orientation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub node: u64,
    pub dof: Dof,
    #[serde(default)]
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalLoad {
    pub node: u64,
    pub dof: Dof,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Gauss points per direction for area integrals.
    pub quadrature: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { quadrature: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub settings: Settings,
    pub nodes: Vec<Node>,
    pub materials: Vec<Material>,
    pub elements: Vec<Element>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default)]
    pub loads: Vec<NodalLoad>,
}

impl Default for Model {
    fn default() -> Self {
        Model {
            schema: MODEL_SCHEMA.to_string(),
            name: String::new(),
            settings: Settings::default(),
            nodes: Vec::new(),
            materials: Vec::new(),
            elements: Vec::new(),
            constraints: Vec::new(),
            loads: Vec::new(),
        }
    }
}

impl Model {
    pub fn from_json(text: &str) -> Result<Model> {
        let model: Model = serde_json::from_str(text).map_err(|e| {
            FemError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        if model.schema != MODEL_SCHEMA {
            return Err(FemError::Parse(format!(
                "unsupported schema '{}', expected '{MODEL_SCHEMA}'",
                model.schema
            )));
        }
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &std::path::Path) -> Result<Model> {
        Model::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn quadrature(&self) -> Result<Quadrature> {
        Quadrature::gauss(self.settings.quadrature)
    }

    pub fn node_index(&self) -> HashMap<u64, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect()
    }

    pub fn material(&self, id: &str) -> Result<&MaterialProps> {
        self.materials
            .iter()
            .find(|m| m.id == id)
            .map(|m| &m.props)
            .ok_or_else(|| FemError::InvalidModel(format!("unknown material '{id}'")))
    }

    /// Replaces the kind of every plate element.
    pub fn set_plate_variant(&mut self, variant: PlateVariant) {
        for e in &mut self.elements {
            if e.kind.plate_variant().is_some() {
                e.kind = ElementKind::from_variant(variant);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let index = self.node_index();
        if index.len() != self.nodes.len() {
            return Err(FemError::InvalidModel("duplicate node id".into()));
        }
        let mut ids = std::collections::HashSet::new();
        for m in &self.materials {
            if !ids.insert(m.id.as_str()) {
                return Err(FemError::InvalidModel(format!("duplicate material id '{}'", m.id)));
            }
        }
        let mut eids = std::collections::HashSet::new();
        for e in &self.elements {
            if !eids.insert(e.id) {
                return Err(FemError::InvalidModel(format!("duplicate element id {}", e.id)));
            }
            if e.nodes.len() != e.kind.node_count() {
                return Err(FemError::InvalidModel(format!(
                    "element {} ({:?}) needs {} nodes, got {}",
                    e.id,
                    e.kind,
                    e.kind.node_count(),
                    e.nodes.len()
                )));
            }
            for n in &e.nodes {
                if !index.contains_key(n) {
                    return Err(FemError::InvalidModel(format!(
                        "element {} references missing node {n}",
                        e.id
                    )));
                }
            }
            let props = self.material(&e.material)?;
            let matches = matches!(
                (e.kind, props),
                (ElementKind::Zdeq | ElementKind::Tfeq | ElementKind::Jfeq, MaterialProps::Plate(_))
                    | (ElementKind::Membrane, MaterialProps::Membrane(_))
                    | (ElementKind::Frame, MaterialProps::Frame(_))
            );
            if !matches {
                return Err(FemError::InvalidModel(format!(
                    "element {} of kind {:?} uses material '{}' of another kind",
                    e.id, e.kind, e.material
                )));
            }
            if e.kind != ElementKind::Frame {
                let corners = self.corners(e, &index)?;
                if corners.signed_area() <= 0.0 {
                    return Err(FemError::InvalidModel(format!(
                        "element {} is not counter-clockwise",
                        e.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn corners(&self, e: &Element, index: &HashMap<u64, usize>) -> Result<QuadCorners> {
        let mut pts = [Point::zeros(); 4];
        for (k, id) in e.nodes.iter().enumerate() {
            let n = &self.nodes[index[id]];
            if n.z != 0.0 {
                return Err(FemError::InvalidModel(format!(
                    "element {} has a node off the z = 0 plane",
                    e.id
                )));
            }
            pts[k] = Point::new(n.x, n.y);
        }
        QuadCorners::new(pts)
    }

    fn point3(&self, index: &HashMap<u64, usize>, id: u64) -> Vector3<f64> {
        let n = &self.nodes[index[&id]];
        Vector3::new(n.x, n.y, n.z)
    }
}

/// Equation numbering of the active DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    /// Per node and slot: full equation index if the slot is active.
    pub equation: Vec<[Option<usize>; 6]>,
    /// Per full equation: `(node index, dof)`.
    pub dofs: Vec<(usize, Dof)>,
    /// Per full equation: free equation index, `None` if constrained.
    pub free: Vec<Option<usize>>,
    /// Prescribed values on the full equation vector (zero on free DOFs).
    pub prescribed: Vec<f64>,
    pub n_free: usize,
}

impl DofMap {
    pub fn total(&self) -> usize {
        self.dofs.len()
    }

    pub fn constrained(&self) -> usize {
        self.total() - self.n_free
    }

    pub fn index(&self, node: usize, dof: Dof) -> Option<usize> {
        self.equation.get(node).and_then(|e| e[dof.slot()])
    }

    /// Full-length vector from free-DOF values, constrained entries prescribed.
    pub fn expand(&self, free_values: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::from_column_slice(&self.prescribed);
        for (eq, f) in self.free.iter().enumerate() {
            if let Some(f) = f {
                out[eq] = free_values[*f];
            }
        }
        out
    }

    /// Free-DOF part of a full-length vector.
    pub fn restrict(&self, full: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_free);
        for (eq, f) in self.free.iter().enumerate() {
            if let Some(f) = f {
                out[*f] = full[eq];
            }
        }
        out
    }

    /// Full-length vector of the global rigid-body motion with translation `t`
    /// and rotation `r` about the origin.
    pub fn rigid_body(&self, model: &Model, t: Vector3<f64>, r: Vector3<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.total());
        for (eq, (node, dof)) in self.dofs.iter().enumerate() {
            let n = &model.nodes[*node];
            let u = t + r.cross(&Vector3::new(n.x, n.y, n.z));
            out[eq] = match dof {
                Dof::Ux => u.x,
                Dof::Uy => u.y,
                Dof::Uz => u.z,
                Dof::Rx => r.x,
                Dof::Ry => r.y,
                Dof::Rz => r.z,
            };
        }
        out
    }
}

pub fn build_dof_map(model: &Model) -> Result<DofMap> {
    model.validate()?;
    let index = model.node_index();
    let mut active = vec![[false; 6]; model.nodes.len()];
    for e in &model.elements {
        for id in &e.nodes {
            for d in e.kind.slots() {
                active[index[id]][d.slot()] = true;
            }
        }
    }
    let mut equation = vec![[None; 6]; model.nodes.len()];
    let mut dofs = Vec::new();
    for (node, act) in active.iter().enumerate() {
        for d in Dof::ALL {
            if act[d.slot()] {
                equation[node][d.slot()] = Some(dofs.len());
                dofs.push((node, d));
            }
        }
    }
    let mut constrained = vec![None; dofs.len()];
    for c in &model.constraints {
        let node = *index.get(&c.node).ok_or_else(|| {
            FemError::InvalidModel(format!("constraint references missing node {}", c.node))
        })?;
        let eq = equation[node][c.dof.slot()].ok_or_else(|| {
            FemError::InvalidModel(format!("constraint on inactive dof {} of node {}", c.dof, c.node))
        })?;
        constrained[eq] = Some(c.value);
    }
    let mut free = Vec::with_capacity(dofs.len());
    let mut prescribed = Vec::with_capacity(dofs.len());
    let mut n_free = 0;
    for c in &constrained {
        match c {
            Some(v) => {
                free.push(None);
                prescribed.push(*v);
            }
            None => {
                free.push(Some(n_free));
                prescribed.push(0.0);
                n_free += 1;
            }
        }
    }
    Ok(DofMap {
        equation,
        dofs,
        free,
        prescribed,
        n_free,
    })
}

/// An element with its computed kernel.
#[derive(Debug, Clone)]
pub enum ElementKernel {
    Plate(Box<PlateElement>),
    Membrane(Box<MembraneElement>),
    Frame(Box<FrameElement>),
}

/// Global-frame element matrices with their equation indices.
#[derive(Debug, Clone)]
pub struct ComputedElement {
    pub id: u64,
    pub kernel: ElementKernel,
    /// Node indices of the element.
    pub nodes: Vec<usize>,
    /// Full equation index per element DOF.
    pub equations: Vec<usize>,
    pub k: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub f: DVector<f64>,
}

impl ComputedElement {
    /// Element DOF vector from a full solution vector.
    pub fn gather(&self, full: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.equations.len(), self.equations.iter().map(|e| full[*e]))
    }
}

fn compute_element(model: &Model, map: &DofMap, index: &HashMap<u64, usize>, e: &Element) -> Result<ComputedElement> {
    let quad = model.quadrature()?;
    let props = model.material(&e.material)?;
    let nodes: Vec<usize> = e.nodes.iter().map(|id| index[id]).collect();
    let (kernel, k, m, f) = match (e.kind, props) {
        (kind, MaterialProps::Plate(mat)) if kind.plate_variant().is_some() => {
            let corners = model.corners(e, index)?;
            let el = PlateElement::new(kind.plate_variant().expect("plate kind"), &corners, *mat, quad)?;
            let q = e.pressure.unwrap_or([0.0; 4]);
            let f = el.global_load(&q);
            let k = el.global_stiffness();
            let m = el.global_mass();
            (
                ElementKernel::Plate(Box::new(el)),
                DMatrix::from_column_slice(12, 12, k.as_slice()),
                DMatrix::from_column_slice(12, 12, m.as_slice()),
                DVector::from_column_slice(f.as_slice()),
            )
        }
        (ElementKind::Membrane, MaterialProps::Membrane(mat)) => {
            let corners = model.corners(e, index)?;
            let el = MembraneElement::new(&corners, *mat, quad)?;
            let f = el.global_load(e.body_force.unwrap_or([0.0; 2]));
            let k = el.global_stiffness();
            let m = el.global_mass();
            (
                ElementKernel::Membrane(Box::new(el)),
                DMatrix::from_column_slice(12, 12, k.as_slice()),
                DMatrix::from_column_slice(12, 12, m.as_slice()),
                DVector::from_column_slice(f.as_slice()),
            )
        }
        (ElementKind::Frame, MaterialProps::Frame(sec)) => {
            let a = model.point3(index, e.nodes[0]);
            let b = model.point3(index, e.nodes[1]);
            let el = FrameElement::new(*sec, a, b, e.orientation.map(Vector3::from))?;
            let f = el.global_load(&e.frame_loads.unwrap_or_default());
            let k = el.global_stiffness();
            let m = el.global_mass();
            (
                ElementKernel::Frame(Box::new(el)),
                DMatrix::from_column_slice(12, 12, k.as_slice()),
                DMatrix::from_column_slice(12, 12, m.as_slice()),
                DVector::from_column_slice(f.as_slice()),
            )
        }
        _ => {
            return Err(FemError::InvalidModel(format!(
                "element {} kind does not match its material",
                e.id
            )))
        }
    };
    let mut equations = Vec::with_capacity(12);
    for n in &nodes {
        for d in e.kind.slots() {
            equations.push(map.index(*n, *d).expect("active dof"));
        }
    }
    Ok(ComputedElement {
        id: e.id,
        kernel,
        nodes,
        equations,
        k,
        m,
        f,
    })
}

/// Thread cap from `TREFFTZ_FEM_THREADS`, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var("TREFFTZ_FEM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Computes all element kernels, in parallel, preserving element order.
pub fn compute_elements(model: &Model, map: &DofMap) -> Result<Vec<ComputedElement>> {
    let index = model.node_index();
    let run = || {
        model
            .elements
            .par_iter()
            .map(|e| {
                compute_element(model, map, &index, e).map_err(|err| match err {
                    FemError::InvalidModel(_) => err,
                    other => other.context(&format!("element {}", e.id)),
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    match thread_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| FemError::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Symmetric matrix storage on the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemMatrix {
    Dense(DMatrix<f64>),
    Skyline(Skyline),
}

impl SystemMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SystemMatrix::Dense(m) => m.nrows(),
            SystemMatrix::Skyline(s) => s.dim(),
        }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        match self {
            SystemMatrix::Dense(m) => m[(i, j)] += v,
            SystemMatrix::Skyline(s) => {
                if i <= j {
                    s.add(i, j, v)
                }
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            SystemMatrix::Dense(m) => m[(i, j)],
            SystemMatrix::Skyline(s) => s.get(i, j),
        }
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            SystemMatrix::Dense(m) => m * x,
            SystemMatrix::Skyline(s) => s.mul_vec(x),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SystemMatrix::Dense(m) => m.clone(),
            SystemMatrix::Skyline(s) => s.to_dense(),
        }
    }
}

/// Column-oriented skyline (profile) storage of the upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Skyline {
    /// First stored row of each column.
    pub first: Vec<usize>,
    /// Offset of each column's first stored entry; `offsets[n]` is the length.
    pub offsets: Vec<usize>,
    pub values: Vec<f64>,
}

impl Skyline {
    pub fn new(first: Vec<usize>) -> Skyline {
        let mut offsets = Vec::with_capacity(first.len() + 1);
        let mut acc = 0;
        for (j, f) in first.iter().enumerate() {
            offsets.push(acc);
            acc += j - f + 1;
        }
        offsets.push(acc);
        Skyline {
            first,
            offsets,
            values: vec![0.0; acc],
        }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        (i >= self.first[j]).then(|| self.offsets[j] + i - self.first[j])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.values[s])
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry inside profile");
        self.values[s] += v;
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.dim());
        for j in 0..self.dim() {
            for i in self.first[j]..=j {
                let v = self.values[self.offsets[j] + i - self.first[j]];
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }
}

/// Free-DOF system after constraint elimination.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub k: SystemMatrix,
    pub m: SystemMatrix,
    pub f: DVector<f64>,
    pub map: DofMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Storage {
    Auto,
    Dense,
    Skyline,
}

fn empty_matrix(n: usize, storage: Storage, elements: &[ComputedElement], map: &DofMap) -> SystemMatrix {
    let skyline = match storage {
        Storage::Dense => false,
        Storage::Skyline => true,
        Storage::Auto => n > DENSE_LIMIT,
    };
    if !skyline {
        return SystemMatrix::Dense(DMatrix::zeros(n, n));
    }
    let mut first: Vec<usize> = (0..n).collect();
    for el in elements {
        let free: Vec<usize> = el.equations.iter().filter_map(|e| map.free[*e]).collect();
        if let Some(min) = free.iter().min() {
            for f in &free {
                first[*f] = first[*f].min(*min);
            }
        }
    }
    SystemMatrix::Skyline(Skyline::new(first))
}

/// Scatter-adds element matrices and nodal loads on the free DOFs.
pub fn assemble_system(
    model: &Model,
    map: &DofMap,
    elements: &[ComputedElement],
    storage: Storage,
) -> Result<AssembledSystem> {
    let n = map.n_free;
    let mut k = empty_matrix(n, storage, elements, map);
    let mut m = empty_matrix(n, storage, elements, map);
    let mut f = DVector::zeros(n);
    for el in elements {
        for (a, ea) in el.equations.iter().enumerate() {
            let Some(fa) = map.free[*ea] else { continue };
            f[fa] += el.f[a];
            for (b, eb) in el.equations.iter().enumerate() {
                match map.free[*eb] {
                    Some(fb) => {
                        k.add(fa, fb, el.k[(a, b)]);
                        m.add(fa, fb, el.m[(a, b)]);
                    }
                    None => f[fa] -= el.k[(a, b)] * map.prescribed[*eb],
                }
            }
        }
    }
    let index = model.node_index();
    for load in &model.loads {
        let node = *index.get(&load.node).ok_or_else(|| {
            FemError::InvalidModel(format!("load references missing node {}", load.node))
        })?;
        let eq = map.index(node, load.dof).ok_or_else(|| {
            FemError::InvalidModel(format!("load on inactive dof {} of node {}", load.dof, load.node))
        })?;
        if let Some(fr) = map.free[eq] {
            f[fr] += load.value;
        }
    }
    Ok(AssembledSystem {
        k,
        m,
        f,
        map: map.clone(),
    })
}

/// DOF map, element kernels and assembled system in one call.
pub fn prepare(model: &Model, storage: Storage) -> Result<(DofMap, Vec<ComputedElement>, AssembledSystem)> {
    let map = build_dof_map(model)?;
    let elements = compute_elements(model, &map)?;
    let system = assemble_system(model, &map, &elements, storage)?;
    Ok((map, elements, system))
}

/// Full-DOF residual forces `K u − F` (reactions on constrained DOFs).
pub fn full_reactions(
    model: &Model,
    map: &DofMap,
    elements: &[ComputedElement],
    u_full: &DVector<f64>,
) -> DVector<f64> {
    let mut r = DVector::zeros(map.total());
    for el in elements {
        let ue = el.gather(u_full);
        let fe = &el.k * ue - &el.f;
        for (a, ea) in el.equations.iter().enumerate() {
            r[*ea] += fe[a];
        }
    }
    let index = model.node_index();
    for load in &model.loads {
        if let Some(eq) = map.index(index[&load.node], load.dof) {
            r[eq] -= load.value;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plate_material() -> Material {
        Material {
            id: "plate".into(),
            props: MaterialProps::Plate(PlateMaterial::new(1000.0, 0.3, 0.1, 1.0).unwrap()),
        }
    }

    fn grid_model(n: usize, kind: ElementKind) -> Model {
        let mut model = Model::default();
        for j in 0..=n {
            for i in 0..=n {
                model.nodes.push(Node {
                    id: (j * (n + 1) + i + 1) as u64,
                    x: i as f64 / n as f64,
                    y: j as f64 / n as f64,
                    z: 0.0,
                });
            }
        }
        let id = |i: usize, j: usize| (j * (n + 1) + i + 1) as u64;
        for j in 0..n {
            for i in 0..n {
                let mut e = Element::new(
                    (j * n + i + 1) as u64,
                    kind,
                    vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
                    if kind == ElementKind::Membrane { "mem" } else { "plate" },
                );
                if kind.plate_variant().is_some() {
                    e.pressure = Some([1.0; 4]);
                }
                model.elements.push(e);
            }
        }
        model.materials.push(plate_material());
        model.materials.push(Material {
            id: "mem".into(),
            props: MaterialProps::Membrane(MembraneMaterial {
                e: 100.0,
                nu: 0.25,
                t: 1.0,
                rho: 1.0,
            }),
        });
        model
    }

    #[test]
    fn plate_grid_dof_counts() {
        let mut model = grid_model(2, ElementKind::Zdeq);
        let map = build_dof_map(&model).unwrap();
        assert_eq!(map.total(), 27);
        for node in &model.nodes {
            if node.x == 0.0 || node.x == 1.0 || node.y == 0.0 || node.y == 1.0 {
                model.constraints.push(Constraint {
                    node: node.id,
                    dof: Dof::Uz,
                    value: 0.0,
                });
            }
        }
        let map = build_dof_map(&model).unwrap();
        assert_eq!(map.n_free, 27 - 8);
        assert_eq!(map.constrained(), 8);
    }

    #[test]
    fn mixed_model_takes_union_of_dofs() {
        let mut model = grid_model(1, ElementKind::Zdeq);
        model.nodes.push(Node {
            id: 99,
            x: 0.0,
            y: 0.0,
            z: -1.0,
        });
        model.materials.push(Material {
            id: "beam".into(),
            props: MaterialProps::Frame(FrameSection {
                e: 1.0,
                nu: 0.3,
                area: 1.0,
                i2: 1.0,
                i3: 1.0,
                it: 1.0,
                rho: 0.0,
            }),
        });
        let mut e = Element::new(10, ElementKind::Frame, vec![99, 1], "beam");
        e.orientation = Some([1.0, 0.0, 0.0]);
        model.elements.push(e);
        let map = build_dof_map(&model).unwrap();
        // Node 1 has all six, the other plate nodes three, node 99 six.
        assert_eq!(map.total(), 6 + 3 * 3 + 6);
        assert!(map.index(0, Dof::Ux).is_some());
        assert!(map.index(1, Dof::Ux).is_none());
        let elements = compute_elements(&model, &map).unwrap();
        let sys = assemble_system(&model, &map, &elements, Storage::Dense).unwrap();
        let k = sys.k.to_dense();
        assert!((&k - k.transpose()).amax() <= 1e-12 * k.amax());
    }

    #[test]
    fn numbering_is_node_major() {
        let model = grid_model(1, ElementKind::Membrane);
        let map = build_dof_map(&model).unwrap();
        assert_eq!(map.dofs[0], (0, Dof::Ux));
        assert_eq!(map.dofs[2], (0, Dof::Rz));
        assert_eq!(map.dofs[3], (1, Dof::Ux));
    }

    #[test]
    fn dangling_reference_is_rejected() {
        let mut model = grid_model(1, ElementKind::Zdeq);
        model.elements[0].nodes[2] = 77;
        assert!(matches!(build_dof_map(&model), Err(FemError::InvalidModel(_))));
        let mut model = grid_model(1, ElementKind::Zdeq);
        model.constraints.push(Constraint {
            node: 1,
            dof: Dof::Ux,
            value: 0.0,
        });
        assert!(matches!(build_dof_map(&model), Err(FemError::InvalidModel(_))));
    }

    #[test]
    fn clockwise_element_is_rejected() {
        let mut model = grid_model(1, ElementKind::Zdeq);
        model.elements[0].nodes.reverse();
        assert!(model.validate().is_err());
    }

    #[test]
    fn rigid_body_in_unconstrained_nullspace() {
        for kind in [ElementKind::Zdeq, ElementKind::Tfeq, ElementKind::Jfeq, ElementKind::Membrane] {
            let model = grid_model(3, kind);
            let (map, _, sys) = prepare(&model, Storage::Dense).unwrap();
            let k = sys.k.to_dense();
            for (t, r) in [
                (Vector3::new(0.0, 0.0, 1.0), Vector3::zeros()),
                (Vector3::new(1.0, 0.0, 0.0), Vector3::zeros()),
                (Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)),
                (Vector3::zeros(), Vector3::new(0.0, 1.0, 0.0)),
                (Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
            ] {
                let u = map.rigid_body(&model, t, r);
                let ku = &k * &u;
                assert!(ku.amax() <= 1e-8 * k.amax() * u.amax().max(1.0), "{kind:?}");
            }
        }
    }

    #[test]
    fn assembly_is_order_independent() {
        let model = grid_model(3, ElementKind::Zdeq);
        let (map, elements, sys) = prepare(&model, Storage::Dense).unwrap();
        let mut rev = elements.clone();
        rev.reverse();
        let sys2 = assemble_system(&model, &map, &rev, Storage::Dense).unwrap();
        let a = sys.k.to_dense();
        let b = sys2.k.to_dense();
        assert!((&a - &b).amax() <= 1e-14 * a.amax());
    }

    #[test]
    fn shared_edge_receives_both_contributions() {
        let model = grid_model(2, ElementKind::Zdeq);
        let (map, elements, sys) = prepare(&model, Storage::Dense).unwrap();
        // Node 5 (centre) is shared by all four elements.
        let eq = map.index(4, Dof::Uz).unwrap();
        let sum: f64 = elements
            .iter()
            .filter_map(|el| el.equations.iter().position(|e| *e == eq).map(|a| el.k[(a, a)]))
            .sum();
        assert!((sys.k.get(eq, eq) - sum).abs() < 1e-12 * sum);
    }

    #[test]
    fn skyline_matches_dense() {
        let mut model = grid_model(3, ElementKind::Zdeq);
        model.constraints.push(Constraint {
            node: 1,
            dof: Dof::Uz,
            value: 0.1,
        });
        let (map, elements, dense) = prepare(&model, Storage::Dense).unwrap();
        let sky = assemble_system(&model, &map, &elements, Storage::Skyline).unwrap();
        assert!(matches!(sky.k, SystemMatrix::Skyline(_)));
        assert!((dense.k.to_dense() - sky.k.to_dense()).amax() < 1e-12);
        assert!((dense.m.to_dense() - sky.m.to_dense()).amax() < 1e-12);
        assert!((&dense.f - &sky.f).amax() < 1e-12);
        let x = DVector::from_fn(map.n_free, |i, _| (i as f64).sin());
        assert!((dense.k.mul_vec(&x) - sky.k.mul_vec(&x)).amax() < 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let mut model = grid_model(2, ElementKind::Jfeq);
        model.loads.push(NodalLoad {
            node: 5,
            dof: Dof::Uz,
            value: 2.0,
        });
        let text = model.to_json();
        let back = Model::from_json(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Model::from_json("{\n \"schema\": \"trefftz-fem/model-v1\",\n \"nodes\": [1]\n}").unwrap_err();
        match err {
            FemError::Parse(msg) => assert!(msg.contains("line 3"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let err = Model::from_json(r#"{"schema":"other","nodes":[],"materials":[],"elements":[]}"#).unwrap_err();
        assert!(matches!(err, FemError::Parse(_)));
    }
}
