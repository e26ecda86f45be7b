//! Result tables written by the command-line tool: nodal displacements,
//! element forces, eigenvalues and sampled plate fields.

use nalgebra::{DVector, Vector3};

use crate::bench::format_sig9;
use crate::error::{FemError, Result};
use crate::frame_element::FrameVec;
use crate::geometry::{isoparametric_eval, Point};
use crate::membrane_element::MemVec;
use crate::model::{ComputedElement, Dof, DofMap, ElementKernel, Model};
use crate::plate_elements::Vec12;
use crate::solver::EigenSolution;

/// Frame in which element forces are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceFrame {
    Global,
    Local,
}

impl ForceFrame {
    pub fn name(self) -> &'static str {
        match self {
            ForceFrame::Global => "global",
            ForceFrame::Local => "local",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceRow {
    pub element: u64,
    pub node: u64,
    pub frame: ForceFrame,
    pub quantity: &'static str,
    pub value: f64,
}

const PLATE_LOCAL: [&str; 5] = ["m11", "m12", "m22", "q1", "q2"];
const PLATE_GLOBAL: [&str; 5] = ["mxx", "mxy", "myy", "qx", "qy"];
const MEMBRANE_LOCAL: [&str; 3] = ["n11", "n12", "n22"];
const MEMBRANE_GLOBAL: [&str; 3] = ["nxx", "nxy", "nyy"];
const FRAME_LOCAL: [&str; 6] = ["n", "q2", "q3", "m1", "m2", "m3"];
const FRAME_GLOBAL: [&str; 6] = ["fx", "fy", "fz", "mx", "my", "mz"];

/// Element forces at the element nodes.
pub fn element_forces(
    model: &Model,
    elements: &[ComputedElement],
    u: &DVector<f64>,
    frame: ForceFrame,
) -> Vec<ForceRow> {
    let mut rows = Vec::new();
    for (el, def) in elements.iter().zip(&model.elements) {
        let ue = el.gather(u);
        let mut push = |node: usize, names: &[&'static str], values: &[f64]| {
            for (q, v) in names.iter().zip(values) {
                rows.push(ForceRow {
                    element: el.id,
                    node: model.nodes[node].id,
                    frame,
                    quantity: q,
                    value: *v,
                });
            }
        };
        match &el.kernel {
            ElementKernel::Plate(p) => {
                let ue = Vec12::from_column_slice(ue.as_slice());
                let q = def.pressure.unwrap_or([0.0; 4]);
                for (k, node) in el.nodes.iter().enumerate() {
                    let at = p.geometry.local.pts[k];
                    let (f, names) = match frame {
                        ForceFrame::Global => (p.recover_global(&ue, &q, at), &PLATE_GLOBAL),
                        ForceFrame::Local => (p.recover_internal_fields(&ue, &q, at), &PLATE_LOCAL),
                    };
                    let v = [f.moments[0], f.moments[1], f.moments[2], f.shears[0], f.shears[1]];
                    push(*node, names, &v);
                }
            }
            ElementKernel::Membrane(m) => {
                let ue = MemVec::from_column_slice(ue.as_slice());
                let body = def.body_force.unwrap_or([0.0; 2]);
                for (k, node) in el.nodes.iter().enumerate() {
                    let at = m.geometry.local.pts[k];
                    let (v, names) = match frame {
                        ForceFrame::Global => (m.recover_forces_global(&ue, body, at), &MEMBRANE_GLOBAL),
                        ForceFrame::Local => (m.recover_forces(&ue, body, at), &MEMBRANE_LOCAL),
                    };
                    push(*node, names, &v);
                }
            }
            ElementKernel::Frame(f) => {
                let ue = FrameVec::from_column_slice(ue.as_slice());
                let loads = def.frame_loads.unwrap_or_default();
                for (k, node) in el.nodes.iter().enumerate() {
                    let (_, s) = f.internal_forces(&ue, &loads, k as f64 * f.length);
                    match frame {
                        ForceFrame::Local => push(*node, &FRAME_LOCAL, &s),
                        ForceFrame::Global => {
                            let force = f.triad.transpose() * Vector3::new(s[0], s[1], s[2]);
                            let moment = f.triad.transpose() * Vector3::new(s[3], s[4], s[5]);
                            let v = [force.x, force.y, force.z, moment.x, moment.y, moment.z];
                            push(*node, &FRAME_GLOBAL, &v);
                        }
                    }
                }
            }
        }
    }
    rows
}

/// One sample of the plate deflection and moment field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub element: u64,
    pub i: usize,
    pub j: usize,
    pub theta: Point,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    /// Global moments `(Mxx, Mxy, Myy)`.
    pub moments: [f64; 3],
}

/// Samples every plate element on a `resolution × resolution` grid spanning
/// its whole parent square.
pub fn sample_plate_field(
    model: &Model,
    elements: &[ComputedElement],
    u: &DVector<f64>,
    resolution: usize,
) -> Result<Vec<FieldSample>> {
    if resolution < 2 {
        return Err(FemError::InvalidArgument(format!(
            "field resolution must be at least 2, got {resolution}"
        )));
    }
    let step = 2.0 / (resolution - 1) as f64;
    let mut out = Vec::new();
    for (el, def) in elements.iter().zip(&model.elements) {
        let ElementKernel::Plate(p) = &el.kernel else { continue };
        let ue = Vec12::from_column_slice(el.gather(u).as_slice());
        let q = def.pressure.unwrap_or([0.0; 4]);
        for j in 0..resolution {
            for i in 0..resolution {
                let theta = Point::new(-1.0 + i as f64 * step, -1.0 + j as f64 * step);
                let local = isoparametric_eval(&p.geometry.local, theta).point;
                let global = isoparametric_eval(&p.geometry.global, theta).point;
                let f = p.recover_global(&ue, &q, local);
                out.push(FieldSample {
                    element: el.id,
                    i,
                    j,
                    theta,
                    x: global.x,
                    y: global.y,
                    w: f.w,
                    moments: f.moments,
                });
            }
        }
    }
    Ok(out)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| FemError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FemError::Io(e.to_string()))
}

fn io(e: csv::Error) -> FemError {
    FemError::Io(e.to_string())
}

/// `node,dof,value` for every active DOF, in node order.
pub fn displacements_csv(model: &Model, map: &DofMap, u: &DVector<f64>) -> Result<String> {
    let mut w = writer();
    w.write_record(["node", "dof", "value"]).map_err(io)?;
    for (k, node) in model.nodes.iter().enumerate() {
        for dof in [Dof::Ux, Dof::Uy, Dof::Uz, Dof::Rx, Dof::Ry, Dof::Rz] {
            if let Some(i) = map.index(k, dof) {
                w.write_record([node.id.to_string(), dof.name().to_string(), format_sig9(u[i])])
                    .map_err(io)?;
            }
        }
    }
    finish(w)
}

pub fn forces_csv(rows: &[ForceRow]) -> Result<String> {
    let mut w = writer();
    w.write_record(["element", "node", "frame", "quantity", "value"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.element.to_string(),
            r.node.to_string(),
            r.frame.name().to_string(),
            r.quantity.to_string(),
            format_sig9(r.value),
        ])
        .map_err(io)?;
    }
    finish(w)
}

pub fn eigenvalues_csv(eig: &EigenSolution) -> Result<String> {
    let mut w = writer();
    w.write_record(["mode", "omega_squared", "omega"]).map_err(io)?;
    for (k, (l, om)) in eig.values.iter().zip(eig.omegas()).enumerate() {
        w.write_record([(k + 1).to_string(), format_sig9(*l), format_sig9(om)]).map_err(io)?;
    }
    finish(w)
}

pub fn field_csv(samples: &[FieldSample]) -> Result<String> {
    let mut w = writer();
    w.write_record(["element", "i", "j", "theta1", "theta2", "x", "y", "w", "mxx", "mxy", "myy"])
        .map_err(io)?;
    for s in samples {
        w.write_record([
            s.element.to_string(),
            s.i.to_string(),
            s.j.to_string(),
            format_sig9(s.theta.x),
            format_sig9(s.theta.y),
            format_sig9(s.x),
            format_sig9(s.y),
            format_sig9(s.w),
            format_sig9(s.moments[0]),
            format_sig9(s.moments[1]),
            format_sig9(s.moments[2]),
        ])
        .map_err(io)?;
    }
    finish(w)
}
