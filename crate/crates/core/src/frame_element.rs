//! Two-node space-frame element with a Trefftz basis that solves the axial,
//! bending and St. Venant torsion equations exactly for linearly varying
//! distributed loads.
//!
//! Local DOFs per node: `(u1, u2, u3, φ1, φ2, φ3)` with `φ3 = u2'` and
//! `φ2 = −u3'`. Load intensities are ordered
//! `(n¹⁽¹⁾, n¹⁽²⁾, q²⁽¹⁾, q²⁽²⁾, q³⁽¹⁾, q³⁽²⁾, m¹⁽¹⁾, m¹⁽²⁾)`.

use nalgebra::{SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::geometry::gauss_rule;

pub type FrameMat = SMatrix<f64, 12, 12>;
pub type FrameVec = SVector<f64, 12>;
pub type FrameLoadMat = SMatrix<f64, 12, 8>;

/// Strain-producing parameters: `c2, c5, c6, c9, c10, c12` (0-based indices).
pub const FRAME_STRAIN_PARAMS: [usize; 6] = [1, 4, 5, 8, 9, 11];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSection {
    pub e: f64,
    pub nu: f64,
    pub area: f64,
    /// Second moment about local axis 2 (bending in the 1–3 plane).
    pub i2: f64,
    /// Second moment about local axis 3 (bending in the 1–2 plane).
    pub i3: f64,
    /// St. Venant torsion constant.
    pub it: f64,
    #[serde(default)]
    pub rho: f64,
}

impl FrameSection {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.e, self.area, self.i2, self.i3, self.it].iter().all(|v| *v > 0.0 && v.is_finite())
            && self.nu > -1.0
            && self.nu < 0.5
            && self.rho >= 0.0;
        if !ok {
            return Err(FemError::InvalidArgument(format!("invalid frame section {self:?}")));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    fn rigidities(&self) -> [f64; 4] {
        [self.e * self.area, self.e * self.i3, self.e * self.i2, self.shear_modulus() * self.it]
    }
}

/// Linearly varying distributed loads by end intensities, local axes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameLoads {
    #[serde(default)]
    pub axial: [f64; 2],
    #[serde(default)]
    pub q2: [f64; 2],
    #[serde(default)]
    pub q3: [f64; 2],
    #[serde(default)]
    pub torque: [f64; 2],
}

impl FrameLoads {
    pub fn as_vector(&self) -> SVector<f64, 8> {
        SVector::<f64, 8>::from_column_slice(&[
            self.axial[0],
            self.axial[1],
            self.q2[0],
            self.q2[1],
            self.q3[0],
            self.q3[1],
            self.torque[0],
            self.torque[1],
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.as_vector().iter().all(|v| *v == 0.0)
    }
}

/// Derivatives 0..=3 of the four component fields `(u1, u2, u3, φ1)`.
pub type FrameDerivs = [[f64; 4]; 4];

/// Homogeneous (12) and particular (8) basis terms at `x` along the axis.
#[derive(Debug, Clone, Copy)]
pub struct FrameBasisEval {
    pub homogeneous: [FrameDerivs; 12],
    pub particular: [FrameDerivs; 8],
}

fn poly_derivs(coefs: &[f64], x: f64) -> [f64; 4] {
    // coefs[k] multiplies x^k.
    let mut out = [0.0; 4];
    for (d, o) in out.iter_mut().enumerate() {
        for (k, c) in coefs.iter().enumerate() {
            if k < d || *c == 0.0 {
                continue;
            }
            let mut f = 1.0;
            for j in 0..d {
                f *= (k - j) as f64;
            }
            *o += c * f * x.powi((k - d) as i32);
        }
    }
    out
}

/// Evaluates the frame basis at `x ∈ [0, ℓ]`.
pub fn frame_basis_eval(section: &FrameSection, length: f64, x: f64) -> FrameBasisEval {
    let mut homogeneous = [[[0.0; 4]; 4]; 12];
    let set = |field: usize, power: usize| -> FrameDerivs {
        let mut c = vec![0.0; power + 1];
        c[power] = 1.0;
        let d = poly_derivs(&c, x);
        let mut out = [[0.0; 4]; 4];
        for k in 0..4 {
            out[k][field] = d[k];
        }
        out
    };
    homogeneous[0] = set(0, 0);
    homogeneous[1] = set(0, 1);
    for p in 0..4 {
        homogeneous[2 + p] = set(1, p);
        homogeneous[6 + p] = set(2, p);
    }
    homogeneous[10] = set(3, 0);
    homogeneous[11] = set(3, 1);

    let [ea, ei3, ei2, gj] = section.rigidities();
    let l = length;
    let second = |r: f64| -> ([f64; 6], [f64; 6]) {
        (
            [0.0, 0.0, -0.5 / r, 1.0 / (6.0 * l * r), 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0 / (6.0 * l * r), 0.0, 0.0],
        )
    };
    let fourth = |r: f64| -> ([f64; 6], [f64; 6]) {
        (
            [0.0, 0.0, 0.0, 0.0, 1.0 / (24.0 * r), -1.0 / (120.0 * l * r)],
            [0.0, 0.0, 0.0, 0.0, 0.0, 1.0 / (120.0 * l * r)],
        )
    };
    let place = |field: usize, coefs: &[f64; 6]| -> FrameDerivs {
        let d = poly_derivs(coefs, x);
        let mut out = [[0.0; 4]; 4];
        for k in 0..4 {
            out[k][field] = d[k];
        }
        out
    };
    let (a1, a2) = second(ea);
    let (b1, b2) = fourth(ei3);
    let (c1, c2) = fourth(ei2);
    let (t1, t2) = second(gj);
    let particular = [
        place(0, &a1),
        place(0, &a2),
        place(1, &b1),
        place(1, &b2),
        place(2, &c1),
        place(2, &c2),
        place(3, &t1),
        place(3, &t2),
    ];
    FrameBasisEval {
        homogeneous,
        particular,
    }
}

/// Section forces `(N, Q2, Q3, M1, M2, M3)` of a field.
///
/// `N = EA u1'`, `M3 = EI3 u2''`, `M2 = −EI2 u3''`, `M1 = GI_t φ1'`,
/// `Q2 = −EI3 u2'''`, `Q3 = −EI2 u3'''`.
pub fn frame_force_functions(section: &FrameSection, d: &FrameDerivs) -> [f64; 6] {
    let [ea, ei3, ei2, gj] = section.rigidities();
    [
        ea * d[1][0],
        -ei3 * d[3][1],
        -ei2 * d[3][2],
        gj * d[1][3],
        -ei2 * d[2][2],
        ei3 * d[2][1],
    ]
}

fn strain_energy(section: &FrameSection, a: &FrameDerivs, b: &FrameDerivs) -> f64 {
    let [ea, ei3, ei2, gj] = section.rigidities();
    ea * a[1][0] * b[1][0] + ei3 * a[2][1] * b[2][1] + ei2 * a[2][2] * b[2][2] + gj * a[1][3] * b[1][3]
}

/// End displacement sextet `(u1, u2, u3, φ1, φ2, φ3)`.
fn end_trace(d: &FrameDerivs) -> [f64; 6] {
    [d[0][0], d[0][1], d[0][2], d[0][3], -d[1][2], d[1][1]]
}

/// End tractions conjugate to [`end_trace`], `sign` = −1 at node 1, +1 at node 2.
fn end_traction(section: &FrameSection, d: &FrameDerivs, sign: f64) -> [f64; 6] {
    let [ea, ei3, ei2, gj] = section.rigidities();
    [
        sign * ea * d[1][0],
        -sign * ei3 * d[3][1],
        -sign * ei2 * d[3][2],
        sign * gj * d[1][3],
        -sign * ei2 * d[2][2],
        sign * ei3 * d[2][1],
    ]
}

/// Parameter elimination data of the frame element.
#[derive(Debug, Clone)]
pub struct FrameHybrid {
    pub h: SMatrix<f64, 6, 6>,
    pub t: SMatrix<f64, 6, 12>,
    pub hbar: SMatrix<f64, 6, 8>,
    pub tbar: FrameLoadMat,
}

/// Which integral identity eliminates the Trefftz parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FramePipeline {
    Hybrid,
    Boundary,
}

/// Builds `H, T, H̄, T̄` with either elimination technique.
pub fn frame_hybrid(section: &FrameSection, length: f64, pipeline: FramePipeline) -> FrameHybrid {
    let mut h = SMatrix::<f64, 6, 6>::zeros();
    let mut hbar = SMatrix::<f64, 6, 8>::zeros();
    let mut t = SMatrix::<f64, 6, 12>::zeros();
    let mut tbar = FrameLoadMat::zeros();
    let ends = [(0.0, -1.0, 0usize), (length, 1.0, 6usize)];
    match pipeline {
        FramePipeline::Hybrid => {
            let rule = gauss_rule(4).expect("valid rule");
            for (xi, w) in rule.nodes.iter().zip(&rule.weights) {
                let x = 0.5 * length * (xi + 1.0);
                let wt = 0.5 * length * w;
                let b = frame_basis_eval(section, length, x);
                for (i, &pi) in FRAME_STRAIN_PARAMS.iter().enumerate() {
                    for (j, &pj) in FRAME_STRAIN_PARAMS.iter().enumerate() {
                        h[(i, j)] += strain_energy(section, &b.homogeneous[pi], &b.homogeneous[pj]) * wt;
                    }
                    for p in 0..8 {
                        hbar[(i, p)] += strain_energy(section, &b.homogeneous[pi], &b.particular[p]) * wt;
                    }
                }
            }
        }
        FramePipeline::Boundary => {
            for &(x, sign, _) in &ends {
                let b = frame_basis_eval(section, length, x);
                for (i, &pi) in FRAME_STRAIN_PARAMS.iter().enumerate() {
                    let ti = end_traction(section, &b.homogeneous[pi], sign);
                    let ui = end_trace(&b.homogeneous[pi]);
                    for (j, &pj) in FRAME_STRAIN_PARAMS.iter().enumerate() {
                        let tj = end_traction(section, &b.homogeneous[pj], sign);
                        let uj = end_trace(&b.homogeneous[pj]);
                        let v: f64 = (0..6).map(|r| ui[r] * tj[r] + uj[r] * ti[r]).sum();
                        h[(i, j)] += 0.5 * v;
                    }
                    for p in 0..8 {
                        let up = end_trace(&b.particular[p]);
                        hbar[(i, p)] += (0..6).map(|r| ti[r] * up[r]).sum::<f64>();
                    }
                }
            }
        }
    }
    for &(x, sign, off) in &ends {
        let b = frame_basis_eval(section, length, x);
        for (i, &pi) in FRAME_STRAIN_PARAMS.iter().enumerate() {
            let ti = end_traction(section, &b.homogeneous[pi], sign);
            for r in 0..6 {
                t[(i, off + r)] += ti[r];
            }
        }
        for p in 0..8 {
            let tp = end_traction(section, &b.particular[p], sign);
            for r in 0..6 {
                tbar[(off + r, p)] += tp[r];
            }
        }
    }
    FrameHybrid { h, t, hbar, tbar }
}

/// Local element triad: rows are the unit axes `e1, e2, e3`.
pub fn frame_triad(a: Vector3<f64>, b: Vector3<f64>, orientation: Option<Vector3<f64>>) -> Result<nalgebra::Matrix3<f64>> {
    let d = b - a;
    let length = d.norm();
    if !(length > 0.0) {
        return Err(FemError::DegenerateGeometry("frame element of zero length".into()));
    }
    let e1 = d / length;
    let mut v = orientation.unwrap_or_else(|| Vector3::z());
    if (v - e1 * v.dot(&e1)).norm() < 1e-9 * v.norm().max(1.0) {
        if orientation.is_some() {
            return Err(FemError::InvalidFrame("orientation vector parallel to member axis".into()));
        }
        v = Vector3::y();
    }
    let e2 = (v - e1 * v.dot(&e1)).normalize();
    let e3 = e1.cross(&e2);
    Ok(nalgebra::Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]))
}

/// Assembled frame element in local and global DOFs.
#[derive(Debug, Clone)]
pub struct FrameElement {
    pub section: FrameSection,
    pub length: f64,
    /// Rows: local axes in global components.
    pub triad: nalgebra::Matrix3<f64>,
    pub k: FrameMat,
    pub m: FrameMat,
    /// Equivalent nodal load per unit load intensity (12 × 8).
    pub load: FrameLoadMat,
    pub hybrid: FrameHybrid,
    /// `H⁻¹T` and `H⁻¹H̄`.
    pub g: SMatrix<f64, 6, 12>,
    pub gbar: SMatrix<f64, 6, 8>,
}

fn consistent_mass(section: &FrameSection, l: f64) -> FrameMat {
    // Homogeneous shapes: linear (axial, torsion) and Hermite cubics.
    let rule = gauss_rule(4).expect("valid rule");
    let ra = section.rho * section.area;
    let rp = section.rho * (section.i2 + section.i3);
    let mut m = FrameMat::zeros();
    for (xi, w) in rule.nodes.iter().zip(&rule.weights) {
        let s = 0.5 * (xi + 1.0);
        let wt = 0.5 * l * w;
        let lin = [1.0 - s, s];
        let h = [1.0 - 3.0 * s * s + 2.0 * s.powi(3), l * (s - 2.0 * s * s + s.powi(3)), 3.0 * s * s - 2.0 * s.powi(3), l * (s.powi(3) - s * s)];
        // Rows of the 4 × 12 interpolation (u1, u2, u3, φ1).
        let mut n = SMatrix::<f64, 4, 12>::zeros();
        n[(0, 0)] = lin[0];
        n[(0, 6)] = lin[1];
        n[(3, 3)] = lin[0];
        n[(3, 9)] = lin[1];
        n[(1, 1)] = h[0];
        n[(1, 5)] = h[1];
        n[(1, 7)] = h[2];
        n[(1, 11)] = h[3];
        n[(2, 2)] = h[0];
        n[(2, 4)] = -h[1];
        n[(2, 8)] = h[2];
        n[(2, 10)] = -h[3];
        let dens = nalgebra::Matrix4::from_diagonal(&nalgebra::Vector4::new(ra, ra, ra, rp));
        m += n.transpose() * dens * n * wt;
    }
    m
}

impl FrameElement {
    pub fn new(
        section: FrameSection,
        a: Vector3<f64>,
        b: Vector3<f64>,
        orientation: Option<Vector3<f64>>,
    ) -> Result<Self> {
        Self::with_pipeline(section, a, b, orientation, FramePipeline::Boundary)
    }

    pub fn with_pipeline(
        section: FrameSection,
        a: Vector3<f64>,
        b: Vector3<f64>,
        orientation: Option<Vector3<f64>>,
        pipeline: FramePipeline,
    ) -> Result<Self> {
        section.validate()?;
        let triad = frame_triad(a, b, orientation)?;
        let length = (b - a).norm();
        let hybrid = frame_hybrid(&section, length, pipeline);
        let hs = (hybrid.h + hybrid.h.transpose()) * 0.5;
        let chol = hs.cholesky().ok_or(FemError::SingularElement {
            rank: 0,
            size: 6,
            reason: "frame flexibility matrix is not positive definite".into(),
        })?;
        let g = chol.solve(&hybrid.t);
        let gbar = chol.solve(&hybrid.hbar);
        let k = hybrid.t.transpose() * g;
        let k = (k + k.transpose()) * 0.5;
        let load = hybrid.t.transpose() * gbar - hybrid.tbar;
        Ok(FrameElement {
            section,
            length,
            triad,
            k,
            m: consistent_mass(&section, length),
            load,
            hybrid,
            g,
            gbar,
        })
    }

    /// `u_local = Q u_global`.
    pub fn transform(&self) -> FrameMat {
        let mut q = FrameMat::zeros();
        for blk in 0..4 {
            q.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(&self.triad);
        }
        q
    }

    pub fn global_stiffness(&self) -> FrameMat {
        let q = self.transform();
        q.transpose() * self.k * q
    }

    pub fn global_mass(&self) -> FrameMat {
        let q = self.transform();
        q.transpose() * self.m * q
    }

    pub fn local_load(&self, loads: &FrameLoads) -> FrameVec {
        self.load * loads.as_vector()
    }

    pub fn global_load(&self, loads: &FrameLoads) -> FrameVec {
        self.transform().transpose() * self.local_load(loads)
    }

    /// Full 12-parameter vector for global nodal displacements.
    pub fn parameters(&self, u_global: &FrameVec, loads: &FrameLoads) -> [f64; 12] {
        let u = self.transform() * u_global;
        let qv = loads.as_vector();
        let cs = self.g * u - self.gbar * qv;
        let mut c = [0.0; 12];
        for (i, &p) in FRAME_STRAIN_PARAMS.iter().enumerate() {
            c[p] = cs[i];
        }
        // Rigid terms from node 1 (the strain fields are exact, so node 2 matches).
        let b0 = frame_basis_eval(&self.section, self.length, 0.0);
        let mut at0 = [[0.0; 4]; 4];
        for (j, bj) in b0.homogeneous.iter().enumerate() {
            for k in 0..4 {
                for f in 0..4 {
                    at0[k][f] += c[j] * bj[k][f];
                }
            }
        }
        for (p, bp) in b0.particular.iter().enumerate() {
            for k in 0..4 {
                for f in 0..4 {
                    at0[k][f] += qv[p] * bp[k][f];
                }
            }
        }
        c[0] = u[0] - at0[0][0];
        c[2] = u[1] - at0[0][1];
        c[3] = u[5] - at0[1][1];
        c[6] = u[2] - at0[0][2];
        c[7] = -u[4] - at0[1][2];
        c[10] = u[3] - at0[0][3];
        c
    }

    /// Local displacements `(u1, u2, u3, φ1)` and section forces at `x`.
    pub fn internal_forces(&self, u_global: &FrameVec, loads: &FrameLoads, x: f64) -> ([f64; 4], [f64; 6]) {
        let c = self.parameters(u_global, loads);
        let b = frame_basis_eval(&self.section, self.length, x);
        let qv = loads.as_vector();
        let mut d = [[0.0; 4]; 4];
        for (j, bj) in b.homogeneous.iter().enumerate() {
            for k in 0..4 {
                for f in 0..4 {
                    d[k][f] += c[j] * bj[k][f];
                }
            }
        }
        for (p, bp) in b.particular.iter().enumerate() {
            for k in 0..4 {
                for f in 0..4 {
                    d[k][f] += qv[p] * bp[k][f];
                }
            }
        }
        (d[0], frame_force_functions(&self.section, &d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section() -> FrameSection {
        FrameSection { e: 210.0, nu: 0.3, area: 2.0, i2: 0.7, i3: 1.3, it: 0.4, rho: 3.0 }
    }

    fn textbook(s: &FrameSection, l: f64) -> FrameMat {
        let g = s.shear_modulus();
        let mut k = FrameMat::zeros();
        let ea = s.e * s.area / l;
        let gj = g * s.it / l;
        let set = |k: &mut FrameMat, i: usize, j: usize, v: f64| {
            k[(i, j)] = v;
            k[(j, i)] = v;
        };
        set(&mut k, 0, 0, ea);
        set(&mut k, 6, 6, ea);
        set(&mut k, 0, 6, -ea);
        set(&mut k, 3, 3, gj);
        set(&mut k, 9, 9, gj);
        set(&mut k, 3, 9, -gj);
        // Bending in 1-2 plane: (u2, φ3).
        let ei = s.e * s.i3;
        let (a, b, c, d) = (12.0 * ei / l.powi(3), 6.0 * ei / l.powi(2), 4.0 * ei / l, 2.0 * ei / l);
        set(&mut k, 1, 1, a);
        set(&mut k, 7, 7, a);
        set(&mut k, 1, 7, -a);
        set(&mut k, 1, 5, b);
        set(&mut k, 1, 11, b);
        set(&mut k, 7, 5, -b);
        set(&mut k, 7, 11, -b);
        set(&mut k, 5, 5, c);
        set(&mut k, 11, 11, c);
        set(&mut k, 5, 11, d);
        // Bending in 1-3 plane: (u3, φ2) with φ2 = −u3'.
        let ei = s.e * s.i2;
        let (a, b, c, d) = (12.0 * ei / l.powi(3), 6.0 * ei / l.powi(2), 4.0 * ei / l, 2.0 * ei / l);
        set(&mut k, 2, 2, a);
        set(&mut k, 8, 8, a);
        set(&mut k, 2, 8, -a);
        set(&mut k, 2, 4, -b);
        set(&mut k, 2, 10, -b);
        set(&mut k, 8, 4, b);
        set(&mut k, 8, 10, b);
        set(&mut k, 4, 4, c);
        set(&mut k, 10, 10, c);
        set(&mut k, 4, 10, d);
        k
    }

    fn element(l: f64, p: FramePipeline) -> FrameElement {
        FrameElement::with_pipeline(section(), Vector3::zeros(), Vector3::new(l, 0.0, 0.0), None, p).unwrap()
    }

    #[test]
    fn stiffness_matches_textbook() {
        for p in [FramePipeline::Hybrid, FramePipeline::Boundary] {
            let el = element(2.5, p);
            let kt = textbook(&section(), 2.5);
            assert!((el.k - kt).abs().max() <= 1e-12 * kt.abs().max(), "{p:?}");
        }
    }

    #[test]
    fn pipelines_agree() {
        let a = element(1.7, FramePipeline::Hybrid);
        let b = element(1.7, FramePipeline::Boundary);
        assert!((a.hybrid.h - b.hybrid.h).abs().max() <= 1e-12 * a.hybrid.h.abs().max());
        assert!((a.hybrid.hbar - b.hybrid.hbar).abs().max() <= 1e-12 * a.hybrid.hbar.abs().max());
        assert!((a.load - b.load).abs().max() <= 1e-12 * a.load.abs().max());
    }

    #[test]
    fn uniform_load_fixed_end_forces() {
        let l = 3.0;
        let el = element(l, FramePipeline::Boundary);
        let q = 2.0;
        let f = el.local_load(&FrameLoads { q2: [q, q], ..Default::default() });
        let tol = 1e-12 * q * l * l;
        assert!((f[1] - q * l / 2.0).abs() < tol);
        assert!((f[7] - q * l / 2.0).abs() < tol);
        assert!((f[5] - q * l * l / 12.0).abs() < tol);
        assert!((f[11] + q * l * l / 12.0).abs() < tol);
        let f = el.local_load(&FrameLoads { q3: [q, q], ..Default::default() });
        assert!((f[2] - q * l / 2.0).abs() < tol);
        assert!((f[4] + q * l * l / 12.0).abs() < tol);
        assert!((f[10] - q * l * l / 12.0).abs() < tol);
    }

    #[test]
    fn triangular_load_fixed_end_forces() {
        let l = 2.0;
        let el = element(l, FramePipeline::Hybrid);
        let q = 1.5;
        // Load q at node 1 decreasing to zero: V1 = 7qL/20, V2 = 3qL/20, M1 = qL²/20, M2 = −qL²/30.
        let f = el.local_load(&FrameLoads { q2: [q, 0.0], axial: [q, 0.0], ..Default::default() });
        let tol = 1e-12 * q * l * l;
        assert!((f[1] - 7.0 * q * l / 20.0).abs() < tol);
        assert!((f[7] - 3.0 * q * l / 20.0).abs() < tol);
        assert!((f[5] - q * l * l / 20.0).abs() < tol);
        assert!((f[11] + q * l * l / 30.0).abs() < tol);
        assert!((f[0] - q * l / 3.0).abs() < tol);
        assert!((f[6] - q * l / 6.0).abs() < tol);
    }

    #[test]
    fn particular_functions() {
        let s = section();
        let l = 2.0;
        let b = frame_basis_eval(&s, l, l);
        let expect = l.powi(4) / (120.0 * s.e * s.i3);
        assert!((b.particular[3][0][1] - expect).abs() < 1e-15);
        let x = 0.6;
        let h = 1e-3;
        // EI3 · d⁴M̄/dx⁴ = 1 − x/ℓ by differences of the third derivative.
        let d3 = |x: f64| frame_basis_eval(&s, l, x).particular[2][3][1];
        let d4 = (d3(x + h) - d3(x - h)) / (2.0 * h);
        assert!((s.e * s.i3 * d4 - (1.0 - x / l)).abs() < 1e-8);
        let b0 = frame_basis_eval(&s, l, 0.0);
        for (j, t) in b0.homogeneous.iter().enumerate() {
            let v: f64 = t[0].iter().sum();
            assert_eq!(v, if [0, 2, 6, 10].contains(&j) { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn force_functions() {
        let s = section();
        let b = frame_basis_eval(&s, 1.0, 0.3);
        let f = frame_force_functions(&s, &b.homogeneous[4]);
        assert!((f[5] - 2.0 * s.e * s.i3).abs() < 1e-12);
        assert!(frame_force_functions(&s, &[[0.0; 4]; 4]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nullity_six() {
        let el = FrameElement::new(section(), Vector3::new(0.1, 0.2, 0.3), Vector3::new(1.0, 2.0, -0.5), None).unwrap();
        let k = el.global_stiffness();
        let mut e: Vec<f64> = k.symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = 1e-9 * e[11];
        assert!(e[..6].iter().all(|v| v.abs() < tol));
        assert!(e[6] > tol);
    }

    #[test]
    fn cantilever_tip_load_recovery() {
        let l = 2.0;
        let el = element(l, FramePipeline::Boundary);
        let s = section();
        let p = 3.0;
        let v = p * l.powi(3) / (3.0 * s.e * s.i3);
        let th = p * l * l / (2.0 * s.e * s.i3);
        let mut u = FrameVec::zeros();
        u[7] = v;
        u[11] = th;
        let f = el.k * u;
        assert!((f[7] - p).abs() < 1e-10);
        assert!(f[11].abs() < 1e-10);
        let ug = el.transform().transpose() * u;
        let (_, forces) = el.internal_forces(&ug, &FrameLoads::default(), 0.0);
        assert!((forces[5] - p * l).abs() < 1e-10, "{forces:?}");
        assert!((forces[1] - p).abs() < 1e-10);
        let (disp, _) = el.internal_forces(&ug, &FrameLoads::default(), l);
        assert!((disp[1] - v).abs() < 1e-12);
    }

    #[test]
    fn zero_state_zero_forces() {
        let el = element(1.0, FramePipeline::Boundary);
        let (d, f) = el.internal_forces(&FrameVec::zeros(), &FrameLoads::default(), 0.4);
        assert!(d.iter().chain(f.iter()).all(|v| *v == 0.0));
    }

    #[test]
    fn triad_fallback_for_vertical_members() {
        let t = frame_triad(Vector3::zeros(), Vector3::new(0.0, 0.0, 2.0), None).unwrap();
        assert!((t * t.transpose() - nalgebra::Matrix3::identity()).abs().max() < 1e-12);
        assert!(frame_triad(Vector3::zeros(), Vector3::z(), Some(Vector3::z())).is_err());
        assert!(frame_triad(Vector3::zeros(), Vector3::zeros(), None).is_err());
    }

    #[test]
    fn mass_translational_total() {
        let el = element(2.0, FramePipeline::Boundary);
        let mut u = FrameVec::zeros();
        u[1] = 1.0;
        u[7] = 1.0;
        let total = u.dot(&(el.m * u));
        assert!((total - section().rho * section().area * 2.0).abs() < 1e-12);
        assert!(el.m.cholesky().is_some());
    }
}
