//! Hybrid plane-stress quadrilateral built from a biharmonic Airy stress
//! function, with drilling rotations entering through Allman-type edge
//! displacements.
//!
//! Local DOFs per node: `(u1, u2, φ3)`. Body loads `(q1, q2)` are constant
//! per element and given in local axes.

use nalgebra::{Matrix2, SMatrix, SVector, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::geometry::{EdgeGeometry, ElementGeometry, LocalFrame, Point, QuadCorners, Quadrature};
use crate::plate_basis::{monomial_derivs, D11, D12, D22};

pub const MEMBRANE_PARAMS: usize = 11;

pub type MemMat = SMatrix<f64, 12, 12>;
pub type MemVec = SVector<f64, 12>;

/// Constrained Airy terms as `(coefficient, a, b)` lists of `x^a y^b`,
/// for `c4..c12, c14, c15`.
pub const AIRY_TERMS: [&[(f64, u32, u32)]; MEMBRANE_PARAMS] = [
    &[(1.0, 2, 0)],
    &[(1.0, 1, 1)],
    &[(1.0, 0, 2)],
    &[(1.0, 3, 0)],
    &[(1.0, 2, 1)],
    &[(1.0, 1, 2)],
    &[(1.0, 0, 3)],
    &[(1.0, 4, 0), (-3.0, 2, 2)],
    &[(1.0, 3, 1)],
    &[(1.0, 1, 3)],
    &[(1.0, 0, 4), (-3.0, 2, 2)],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneMaterial {
    pub e: f64,
    pub nu: f64,
    pub t: f64,
    #[serde(default)]
    pub rho: f64,
}

impl MembraneMaterial {
    pub fn validate(&self) -> Result<()> {
        if !(self.e > 0.0 && self.t > 0.0 && self.nu >= 0.0 && self.nu < 0.5 && self.rho >= 0.0) {
            return Err(FemError::InvalidArgument(format!("membrane material out of range: {self:?}")));
        }
        Ok(())
    }

    /// Complementary energy density `n_a : C : n_b` for `(n11, n12, n22)`.
    pub fn compliance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        (a[0] * b[0] - self.nu * (a[0] * b[2] + a[2] * b[0])
            + a[2] * b[2]
            + 2.0 * (1.0 + self.nu) * a[1] * b[1])
            / (self.e * self.t)
    }
}

/// Second derivatives `(F,11, F,12, F,22)` of each constrained Airy term.
pub fn airy_basis_eval(p: Point) -> [[f64; 3]; MEMBRANE_PARAMS] {
    AIRY_TERMS.map(|terms| {
        let mut out = [0.0; 3];
        for &(c, a, b) in terms {
            let d = monomial_derivs(a, b, p);
            out[0] += c * d[D11];
            out[1] += c * d[D12];
            out[2] += c * d[D22];
        }
        out
    })
}

/// Biharmonic residual of a constrained term (exact polynomial arithmetic).
pub fn airy_biharmonic(index: usize, p: Point) -> f64 {
    AIRY_TERMS[index]
        .iter()
        .map(|&(c, a, b)| c * crate::plate_basis::monomial_biharmonic(a, b, p))
        .sum()
}

/// Membrane forces `(n11, n12, n22)` of each basis term (11 columns).
///
/// `n11 = F,22`, `n22 = F,11`, `n12 = −F,12`.
pub fn membrane_force_basis(p: Point) -> [[f64; 3]; MEMBRANE_PARAMS] {
    airy_basis_eval(p).map(|d| [d[2], -d[1], d[0]])
}

/// Particular forces for unit body loads `q1` and `q2`.
pub fn membrane_particular_forces(p: Point) -> [[f64; 3]; 2] {
    [[0.0, -p.y, 0.0], [0.0, -p.x, 0.0]]
}

/// Edge displacement interpolation at `ξ ∈ [0,1]`: 2 × 12 map from local DOFs.
///
/// Linear in the end translations plus a normal bubble
/// `ξ(1−ξ) ℓ (φ_b − φ_a)/2` along the outward normal.
pub fn membrane_edge_frame(geom: &EdgeGeometry, edge: usize, xi: f64) -> SMatrix<f64, 2, 12> {
    let a = edge % 4;
    let b = (edge + 1) % 4;
    let mut l = SMatrix::<f64, 2, 12>::zeros();
    let bubble = xi * (1.0 - xi) * geom.length * 0.5;
    for r in 0..2 {
        l[(r, 3 * a + r)] = 1.0 - xi;
        l[(r, 3 * b + r)] = xi;
        l[(r, 3 * a + 2)] = -bubble * geom.normal[r];
        l[(r, 3 * b + 2)] = bubble * geom.normal[r];
    }
    l
}

/// Block-diagonal DOF rotation with `u_local = Q u_global`.
pub fn membrane_transform(frame: &LocalFrame) -> MemMat {
    let rt = frame.rotation().transpose();
    let mut q = MemMat::zeros();
    for n in 0..4 {
        let c = 3 * n;
        q.fixed_view_mut::<2, 2>(c, c).copy_from(&rt);
        q[(c + 2, c + 2)] = 1.0;
    }
    q
}

#[derive(Debug, Clone)]
pub struct MembraneElement {
    pub geometry: ElementGeometry,
    pub material: MembraneMaterial,
    pub quadrature: Quadrature,
    /// Monomials are evaluated at `x / scale`.
    pub scale: f64,
    pub h: SMatrix<f64, MEMBRANE_PARAMS, MEMBRANE_PARAMS>,
    pub t: SMatrix<f64, MEMBRANE_PARAMS, 12>,
    pub hbar: SMatrix<f64, MEMBRANE_PARAMS, 2>,
    pub tbar: SMatrix<f64, 12, 2>,
    pub g: SMatrix<f64, MEMBRANE_PARAMS, 12>,
    pub gbar: SMatrix<f64, MEMBRANE_PARAMS, 2>,
    pub k: MemMat,
    pub m: MemMat,
    /// Equivalent nodal loads per unit body load (12 × 2).
    pub load: SMatrix<f64, 12, 2>,
}

fn rank(h: &SMatrix<f64, MEMBRANE_PARAMS, MEMBRANE_PARAMS>) -> usize {
    let sv = h.svd(false, false).singular_values;
    let max = sv.max();
    sv.iter().filter(|v| **v > 1e-10 * max).count()
}

impl MembraneElement {
    pub fn new(corners: &QuadCorners, material: MembraneMaterial, quadrature: Quadrature) -> Result<Self> {
        material.validate()?;
        let geometry = ElementGeometry::new(*corners)?;
        let scale = 0.5 * geometry.local.diameter();
        let pts = geometry.area_points(quadrature)?;
        let mut h = SMatrix::<f64, MEMBRANE_PARAMS, MEMBRANE_PARAMS>::zeros();
        let mut hbar = SMatrix::<f64, MEMBRANE_PARAMS, 2>::zeros();
        let mut m = MemMat::zeros();
        for (p, w) in &pts {
            let n = membrane_force_basis(p / scale);
            let nb = membrane_particular_forces(*p);
            for i in 0..MEMBRANE_PARAMS {
                for j in 0..MEMBRANE_PARAMS {
                    h[(i, j)] += material.compliance(&n[i], &n[j]) * w;
                }
                for q in 0..2 {
                    hbar[(i, q)] += material.compliance(&n[i], &nb[q]) * w;
                }
            }
            // Consistent translational mass with bilinear shapes.
            let theta = inverse_bilinear(&geometry.local, *p);
            let s = crate::geometry::bilinear_shape(theta);
            let rt = material.rho * material.t;
            for a in 0..4 {
                for b in 0..4 {
                    let v = rt * s[a] * s[b] * w;
                    m[(3 * a, 3 * b)] += v;
                    m[(3 * a + 1, 3 * b + 1)] += v;
                }
            }
        }
        let mut t = SMatrix::<f64, MEMBRANE_PARAMS, 12>::zeros();
        let mut tbar = SMatrix::<f64, 12, 2>::zeros();
        for edge in 0..4 {
            let (s, e) = geometry.local.edge(edge);
            let eg = EdgeGeometry::new(s, e)?;
            for (xi, w) in eg.gauss_points(4)? {
                let p = eg.point_at(xi);
                let l = membrane_edge_frame(&eg, edge, xi);
                let nrm = eg.normal;
                let traction = |f: &[f64; 3]| {
                    Vector2::new(f[0] * nrm.x + f[1] * nrm.y, f[1] * nrm.x + f[2] * nrm.y)
                };
                let n = membrane_force_basis(p / scale);
                for i in 0..MEMBRANE_PARAMS {
                    let tr = traction(&n[i]);
                    let row = l.transpose() * tr;
                    for dof in 0..12 {
                        t[(i, dof)] += row[dof] * w;
                    }
                }
                let nb = membrane_particular_forces(p);
                for q in 0..2 {
                    let row = l.transpose() * traction(&nb[q]);
                    for dof in 0..12 {
                        tbar[(dof, q)] += row[dof] * w;
                    }
                }
            }
        }
        let hs = (h + h.transpose()) * 0.5;
        let r = rank(&hs);
        let singular = |r: usize| FemError::SingularElement {
            rank: r,
            size: MEMBRANE_PARAMS,
            reason: format!(
                "membrane H is singular with {0}x{0} Gauss integration; use at least 3x3",
                quadrature.order()
            ),
        };
        if r < MEMBRANE_PARAMS {
            return Err(singular(r));
        }
        let chol = hs.cholesky().ok_or_else(|| singular(r))?;
        let g = chol.solve(&t);
        let gbar = chol.solve(&hbar);
        let k = t.transpose() * g;
        let k = (k + k.transpose()) * 0.5;
        let load = t.transpose() * gbar - tbar;
        Ok(MembraneElement {
            geometry,
            material,
            quadrature,
            scale,
            h: hs,
            t,
            hbar,
            tbar,
            g,
            gbar,
            k,
            m,
            load,
        })
    }

    pub fn transform(&self) -> MemMat {
        membrane_transform(&self.geometry.frame)
    }

    pub fn global_stiffness(&self) -> MemMat {
        let q = self.transform();
        q.transpose() * self.k * q
    }

    pub fn global_mass(&self) -> MemMat {
        let q = self.transform();
        q.transpose() * self.m * q
    }

    /// Equivalent nodal loads for a body load given in global axes.
    pub fn global_load(&self, body_global: [f64; 2]) -> MemVec {
        let ql = self.geometry.frame.vector_to_local(Point::new(body_global[0], body_global[1]));
        self.transform().transpose() * (self.load * ql)
    }

    /// Local membrane forces `(n11, n12, n22)` at a local point.
    pub fn recover_forces(&self, u_global: &MemVec, body_global: [f64; 2], p: Point) -> [f64; 3] {
        let u = self.transform() * u_global;
        let ql = self.geometry.frame.vector_to_local(Point::new(body_global[0], body_global[1]));
        let c = self.g * u - self.gbar * ql;
        let n = membrane_force_basis(p / self.scale);
        let nb = membrane_particular_forces(p);
        let mut out = [0.0; 3];
        for i in 0..MEMBRANE_PARAMS {
            for k in 0..3 {
                out[k] += c[i] * n[i][k];
            }
        }
        for q in 0..2 {
            for k in 0..3 {
                out[k] += ql[q] * nb[q][k];
            }
        }
        out
    }

    /// Forces at a local point in global axes.
    pub fn recover_forces_global(&self, u_global: &MemVec, body_global: [f64; 2], p: Point) -> [f64; 3] {
        let f = self.recover_forces(u_global, body_global, p);
        let r = self.geometry.frame.rotation();
        let n = Matrix2::new(f[0], f[1], f[1], f[2]);
        let g = r * n * r.transpose();
        [g[(0, 0)], g[(0, 1)], g[(1, 1)]]
    }
}

/// Biunit coordinates of a point inside a bilinear quadrilateral (Newton).
pub fn inverse_bilinear(corners: &QuadCorners, p: Point) -> Point {
    let mut theta = Point::zeros();
    for _ in 0..50 {
        let iso = crate::geometry::isoparametric_eval(corners, theta);
        let r = iso.point - p;
        if r.norm() < 1e-14 * corners.diameter() {
            break;
        }
        let j = iso.covariant.transpose();
        match j.try_inverse() {
            Some(ji) => theta -= ji * r,
            None => break,
        }
    }
    theta
}
