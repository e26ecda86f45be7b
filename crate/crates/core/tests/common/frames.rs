//! Random space frames and checks of the frame element against the
//! closed-form matrices and the ODE oracle.

use nalgebra::{SVector, Vector3};
use proptest::prelude::*;

use super::oracle::*;
use super::properties::{nullity, Check};
use trefftz_fem::frame_element::{FrameElement, FrameLoads, FramePipeline, FrameSection};
use trefftz_fem::model::{
    prepare, Constraint, Dof, Element, ElementKind, Material, MaterialProps, Model, NodalLoad, Node, Storage,
};
use trefftz_fem::solver::solve_static;

const DOFS: [Dof; 6] = [Dof::Ux, Dof::Uy, Dof::Uz, Dof::Rx, Dof::Ry, Dof::Rz];

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn section() -> impl Strategy<Value = FrameSection> {
    (0.5f64..2.0, 0.0f64..0.45, 0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0).prop_map(
        |(e, nu, area, i2, i3, it)| FrameSection {
            e: 1000.0 * e,
            nu,
            area,
            i2: 0.1 * i2,
            i3: 0.1 * i3,
            it: 0.1 * it,
            rho: 1.0,
        },
    )
}

pub fn loads() -> impl Strategy<Value = FrameLoads> {
    prop::array::uniform8(-2.0f64..2.0).prop_map(|v| FrameLoads {
        axial: [v[0], v[1]],
        q2: [v[2], v[3]],
        q3: [v[4], v[5]],
        torque: [v[6], v[7]],
    })
}

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-1.0f64..1.0)
        .prop_map(Vector3::from)
        .prop_filter("non-zero", |v| v.norm() > 0.2)
}

/// Node layout of the five-member test frame: a chain 0-1-2-3 with branches
/// 1-4 and 2-5; nodes 0, 3 and 4 are clamped.
const MEMBERS: [[usize; 2]; 5] = [[0, 1], [1, 2], [2, 3], [1, 4], [2, 5]];
const CLAMPED: [usize; 3] = [0, 3, 4];

#[derive(Debug, Clone)]
pub struct RandomFrame {
    pub coords: Vec<Vector3<f64>>,
    pub members: Vec<OracleMember>,
    pub nodal: Vec<(usize, [f64; 6])>,
}

pub fn random_frame() -> impl Strategy<Value = RandomFrame> {
    (
        prop::collection::vec(prop::array::uniform3(-0.4f64..0.4), 6),
        prop::collection::vec((section(), loads(), unit_vector()), 5),
        prop::collection::vec(prop::array::uniform6(-1.0f64..1.0), 2),
    )
        .prop_map(|(jitter, props, forces)| {
            let base = [
                [0.0, 0.0, 0.0],
                [2.0, 0.0, 1.0],
                [4.0, 0.5, 1.0],
                [6.0, 0.0, 0.0],
                [2.0, 2.0, 0.0],
                [4.0, -1.5, 2.0],
            ];
            let coords = base
                .iter()
                .zip(&jitter)
                .map(|(b, j)| Vector3::new(b[0] + j[0], b[1] + j[1], b[2] + j[2]))
                .collect();
            let members = MEMBERS
                .iter()
                .zip(props)
                .map(|(nodes, (section, loads, orientation))| OracleMember {
                    nodes: *nodes,
                    section,
                    loads,
                    orientation,
                })
                .collect();
            RandomFrame {
                coords,
                members,
                nodal: vec![(1, forces[0]), (5, forces[1])],
            }
        })
        .prop_filter("orientation not along a member", |f| {
            f.members.iter().all(|m| {
                let axis = (f.coords[m.nodes[1]] - f.coords[m.nodes[0]]).normalize();
                axis.cross(&m.orientation.normalize()).norm() > 0.2
            })
        })
}

pub fn to_model(f: &RandomFrame) -> Model {
    let mut model = Model {
        name: "random frame".into(),
        ..Model::default()
    };
    for (i, c) in f.coords.iter().enumerate() {
        model.nodes.push(Node {
            id: i as u64 + 1,
            x: c.x,
            y: c.y,
            z: c.z,
        });
    }
    for (k, m) in f.members.iter().enumerate() {
        let id = format!("s{k}");
        model.materials.push(Material {
            id: id.clone(),
            props: MaterialProps::Frame(m.section),
        });
        let mut e = Element::new(
            k as u64 + 1,
            ElementKind::Frame,
            m.nodes.iter().map(|n| *n as u64 + 1).collect(),
            &id,
        );
        e.frame_loads = Some(m.loads);
        e.orientation = Some(m.orientation.into());
        model.elements.push(e);
    }
    for n in CLAMPED {
        for dof in DOFS {
            model.constraints.push(Constraint {
                node: n as u64 + 1,
                dof,
                value: 0.0,
            });
        }
    }
    for (n, p) in &f.nodal {
        for (dof, v) in DOFS.iter().zip(p) {
            model.loads.push(NodalLoad {
                node: *n as u64 + 1,
                dof: *dof,
                value: *v,
            });
        }
    }
    model
}

/// Nodal displacements of the assembled model against the ODE oracle,
/// relative to the largest translation or rotation.
pub fn frame_matches_oracle(frame: &RandomFrame) -> Check {
    let model = to_model(frame);
    let (map, _, system) = prepare(&model, Storage::Auto).map_err(|e| e.to_string())?;
    let u = solve_static(&system).map_err(|e| e.to_string())?.u;
    let expect = oracle_frame_solve(&frame.coords, &frame.members, &CLAMPED, &frame.nodal);
    for group in [0..3, 3..6] {
        let scale = expect
            .iter()
            .flat_map(|e| e[group.clone()].iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for (node, e) in expect.iter().enumerate() {
            for c in group.clone() {
                let got = map.index(node, DOFS[c]).map_or(0.0, |i| u[i]);
                ensure!((got - e[c]).abs() <= 1e-9 * scale, "node {node} dof {c}: {got} vs {}", e[c]);
            }
        }
    }
    Ok(())
}

/// Stiffness and equivalent loads of both pipelines against the closed form;
/// the pipelines against each other.
pub fn member_matches_closed_form(s: &FrameSection, q: &FrameLoads, l: f64) -> Check {
    let k = closed_form_frame_stiffness(s, l);
    let fe = closed_form_frame_load(q, l);
    let kmax = k.abs().max();
    let fmax = fe.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let build = |p| FrameElement::with_pipeline(*s, Vector3::zeros(), Vector3::new(l, 0.0, 0.0), None, p);
    let hy = build(FramePipeline::Hybrid).map_err(|e| e.to_string())?;
    let bd = build(FramePipeline::Boundary).map_err(|e| e.to_string())?;
    for (name, el) in [("hybrid", &hy), ("boundary", &bd)] {
        for i in 0..12 {
            for j in 0..12 {
                ensure!((el.k[(i, j)] - k[(i, j)]).abs() <= 1e-12 * kmax, "{name} k({i},{j})");
            }
        }
        let f = el.local_load(q);
        for i in 0..12 {
            ensure!((f[i] - fe[i]).abs() <= 1e-12 * fmax, "{name} load {i}: {} vs {}", f[i], fe[i]);
        }
    }
    ensure!((hy.k - bd.k).abs().max() <= 1e-12 * kmax, "pipelines disagree on k");
    ensure!(
        (hy.local_load(q) - bd.local_load(q)).abs().max() <= 1e-12 * fmax,
        "pipelines disagree on loads"
    );
    Ok(())
}

/// `K d − f` against end forces from the member's differential equations.
pub fn end_forces_match_oracle(s: &FrameSection, q: &FrameLoads, d: &[f64; 12], l: f64) -> Check {
    let el = FrameElement::new(*s, Vector3::zeros(), Vector3::new(l, 0.0, 0.0), None).map_err(|e| e.to_string())?;
    let f = el.k * SVector::<f64, 12>::from_column_slice(d) - el.local_load(q);
    let o = oracle_end_forces(s, l, d, q);
    let scale = o.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
    for i in 0..12 {
        ensure!((f[i] - o[i]).abs() <= 1e-9 * scale, "end force {i}: {} vs {}", f[i], o[i]);
    }
    Ok(())
}

/// A free skew member: symmetric global stiffness with six rigid modes.
pub fn free_member_nullity(s: &FrameSection, b: Vector3<f64>, v: Vector3<f64>) -> Check {
    let el = FrameElement::new(*s, Vector3::zeros(), b, Some(v)).map_err(|e| e.to_string())?;
    let k = el.global_stiffness();
    let asym = (k - k.transpose()).abs().max() / k.abs().max();
    ensure!(asym <= 1e-10, "frame asymmetry {asym:e}");
    let mut e: Vec<f64> = k.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    ensure!(nullity(&e) == 6, "frame spectrum {e:?}");
    Ok(())
}
