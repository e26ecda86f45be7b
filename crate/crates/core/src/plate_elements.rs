//! Quadrilateral Kirchhoff plate elements: displacement (ZDEQ), hybrid
//! (TFEQ) and boundary (JFEQ) variants.
//!
//! All matrices are produced in element-local DOFs `(w, θ1, θ2)` per node and
//! rotated to global axes by [`plate_transform`]. Load vectors are stored as
//! 12×4 matrices acting on the four nodal load intensities.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::geometry::{EdgeGeometry, ElementGeometry, LocalFrame, Point, QuadCorners, Quadrature};
use crate::plate_basis::{
    nodal_triple, Derivs, PlateBasis, D1, D11, D111, D112, D12, D122, D2, D22, D222, W,
};

pub type Mat12 = SMatrix<f64, 12, 12>;
pub type Vec12 = SVector<f64, 12>;
pub type LoadMat = SMatrix<f64, 12, 4>;

/// Gauss points per edge for boundary integrals.
pub const EDGE_POINTS: usize = 4;

/// Number of strain-producing Trefftz parameters (rigid terms removed).
pub const STRAIN_PARAMS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateMaterial {
    pub e: f64,
    pub nu: f64,
    pub t: f64,
    pub rho: f64,
    /// Include the `ρt³/12` rotary inertia in the mass matrix.
    #[serde(default = "default_rotary")]
    pub rotary_inertia: bool,
}

fn default_rotary() -> bool {
    true
}

impl PlateMaterial {
    pub fn new(e: f64, nu: f64, t: f64, rho: f64) -> Result<Self> {
        let m = PlateMaterial {
            e,
            nu,
            t,
            rho,
            rotary_inertia: true,
        };
        m.validate()?;
        Ok(m)
    }

    /// Material with a prescribed rigidity `D` and mass per area `ρt`.
    pub fn from_rigidity(d: f64, nu: f64, t: f64, rho_t: f64) -> Result<Self> {
        let e = 12.0 * d * (1.0 - nu * nu) / t.powi(3);
        PlateMaterial::new(e, nu, t, rho_t / t)
    }

    /// Same material with translational inertia only.
    pub fn without_rotary_inertia(self) -> Self {
        PlateMaterial {
            rotary_inertia: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e > 0.0 && self.t > 0.0 && self.nu >= 0.0 && self.nu < 0.5 && self.rho >= 0.0)
        {
            return Err(FemError::InvalidArgument(format!(
                "plate material out of range: E={}, ν={}, t={}, ρ={}",
                self.e, self.nu, self.t, self.rho
            )));
        }
        Ok(())
    }

    pub fn rigidity(&self) -> f64 {
        self.e * self.t.powi(3) / (12.0 * (1.0 - self.nu * self.nu))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlateVariant {
    Zdeq,
    Tfeq,
    Jfeq,
}

impl PlateVariant {
    pub fn name(self) -> &'static str {
        match self {
            PlateVariant::Zdeq => "zdeq",
            PlateVariant::Tfeq => "tfeq",
            PlateVariant::Jfeq => "jfeq",
        }
    }
}

impl std::str::FromStr for PlateVariant {
    type Err = FemError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zdeq" | "zde" => Ok(PlateVariant::Zdeq),
            "tfeq" | "tfe" => Ok(PlateVariant::Tfeq),
            "jfeq" | "jfe" => Ok(PlateVariant::Jfeq),
            _ => Err(FemError::InvalidArgument(format!("unknown plate variant '{s}'"))),
        }
    }
}

/// Bending energy density `κ_a : E : κ_b` from two curvature sets.
pub fn bending_energy(a: &Derivs, b: &Derivs, d: f64, nu: f64) -> f64 {
    d * (a[D11] * b[D11]
        + nu * (a[D11] * b[D22] + a[D22] * b[D11])
        + a[D22] * b[D22]
        + 2.0 * (1.0 - nu) * a[D12] * b[D12])
}

/// Stress couples of the stiffness sign convention, `m = D[(1−ν)κ + ν tr κ I]`.
///
/// Physical bending moments are their negatives.
pub fn stress_couples(d: &Derivs, rigidity: f64, nu: f64) -> (f64, f64, f64) {
    (
        rigidity * (d[D11] + nu * d[D22]),
        rigidity * (d[D22] + nu * d[D11]),
        rigidity * (1.0 - nu) * d[D12],
    )
}

/// Boundary traction triple conjugate to `(w, ∂w/∂n, ∂w/∂t)`.
///
/// With `q_i = D ∂_i∇²w` the triple is `(−q·n, n·m·n, t·m·n)`, so that
/// `∫ m:∇∇b dA = ∮ traction·(b, b,n, b,t) ds + ∫ (D∇⁴w) b dA`.
pub fn traction_triple(d: &Derivs, rigidity: f64, nu: f64, normal: Point) -> [f64; 3] {
    let (m11, m22, m12) = stress_couples(d, rigidity, nu);
    let q1 = rigidity * (d[D111] + d[D122]);
    let q2 = rigidity * (d[D112] + d[D222]);
    let tangent = Point::new(-normal.y, normal.x);
    let mn = Point::new(m11 * normal.x + m12 * normal.y, m12 * normal.x + m22 * normal.y);
    [
        -(q1 * normal.x + q2 * normal.y),
        mn.dot(&normal),
        mn.dot(&tangent),
    ]
}

/// Boundary trace `(w, ∂w/∂n, ∂w/∂t)` of a field.
pub fn boundary_trace(d: &Derivs, normal: Point) -> [f64; 3] {
    [
        d[W],
        d[D1] * normal.x + d[D2] * normal.y,
        -d[D1] * normal.y + d[D2] * normal.x,
    ]
}

/// Frame functions of one edge sampled at Gauss points.
#[derive(Debug, Clone)]
pub struct EdgeFrame {
    pub edge: usize,
    pub geom: EdgeGeometry,
    pub points: Vec<EdgeFramePoint>,
}

#[derive(Debug, Clone)]
pub struct EdgeFramePoint {
    pub xi: f64,
    pub weight: f64,
    pub point: Point,
    /// Maps the 12 local nodal DOFs to `(w, ∂w/∂n, ∂w/∂t)`.
    pub l: SMatrix<f64, 3, 12>,
}

/// Frame-function matrix of an edge at `ξ ∈ [0, 1]`.
///
/// `w` is the Hermite cubic in arc length from end deflections and tangential
/// slopes, `∂w/∂n` is linear between the end normal slopes.
pub fn edge_frame_matrix(geom: &EdgeGeometry, edge: usize, xi: f64) -> SMatrix<f64, 3, 12> {
    let a = edge % 4;
    let b = (edge + 1) % 4;
    let l = geom.length;
    let t = geom.tangent;
    let n = geom.normal;
    // ∇w = (−θ2, θ1): slope along a direction d is θ1·d_y − θ2·d_x.
    let slope = |d: Point| [d.y, -d.x];
    let (ts, ns) = (slope(t), slope(n));
    let x2 = xi * xi;
    let x3 = x2 * xi;
    let h = [1.0 - 3.0 * x2 + 2.0 * x3, l * (xi - 2.0 * x2 + x3), 3.0 * x2 - 2.0 * x3, l * (x3 - x2)];
    let dh = [
        (6.0 * x2 - 6.0 * xi) / l,
        1.0 - 4.0 * xi + 3.0 * x2,
        (6.0 * xi - 6.0 * x2) / l,
        3.0 * x2 - 2.0 * xi,
    ];
    let mut m = SMatrix::<f64, 3, 12>::zeros();
    for (k, node) in [a, b].into_iter().enumerate() {
        let c = 3 * node;
        let (hv, hs, dv, ds) = (h[2 * k], h[2 * k + 1], dh[2 * k], dh[2 * k + 1]);
        m[(0, c)] += hv;
        m[(0, c + 1)] += hs * ts[0];
        m[(0, c + 2)] += hs * ts[1];
        let lin = if k == 0 { 1.0 - xi } else { xi };
        m[(1, c + 1)] += lin * ns[0];
        m[(1, c + 2)] += lin * ns[1];
        m[(2, c)] += dv;
        m[(2, c + 1)] += ds * ts[0];
        m[(2, c + 2)] += ds * ts[1];
    }
    m
}

/// Frame functions of edge `edge` (from corner `edge` to corner `edge+1`).
pub fn edge_frame_functions(corners_local: &QuadCorners, edge: usize) -> Result<EdgeFrame> {
    if edge >= 4 {
        return Err(FemError::InvalidArgument(format!("edge index {edge} out of range")));
    }
    let (s, e) = corners_local.edge(edge);
    let geom = EdgeGeometry::new(s, e)?;
    let points = geom
        .gauss_points(EDGE_POINTS)?
        .into_iter()
        .map(|(xi, weight)| EdgeFramePoint {
            xi,
            weight,
            point: geom.point_at(xi),
            l: edge_frame_matrix(&geom, edge, xi),
        })
        .collect();
    Ok(EdgeFrame { edge, geom, points })
}

/// Hybrid parameter-elimination data shared by TFEQ and JFEQ.
#[derive(Debug, Clone)]
pub struct HybridData {
    pub h: SMatrix<f64, STRAIN_PARAMS, STRAIN_PARAMS>,
    pub t: SMatrix<f64, STRAIN_PARAMS, 12>,
    pub hbar: SMatrix<f64, STRAIN_PARAMS, 4>,
    /// `∮ Lᵀ traction(M̄)`, 12 × 4.
    pub tbar: LoadMat,
    /// `H⁻¹T`.
    pub g: SMatrix<f64, STRAIN_PARAMS, 12>,
    /// `H⁻¹H̄`.
    pub gbar: SMatrix<f64, STRAIN_PARAMS, 4>,
}

/// Element matrices in local DOFs.
#[derive(Debug, Clone)]
pub struct PlateElementMatrices {
    pub k: Mat12,
    pub m: Mat12,
    /// Equivalent nodal load per unit nodal intensity: `f̄2 − f̄1` or `r̄`.
    pub load: LoadMat,
    pub f2: LoadMat,
    pub f1: LoadMat,
    /// Energy constant quadratic form `q̄ᵀ C q̄`.
    pub energy: Matrix4<f64>,
    pub hybrid: Option<HybridData>,
}

/// A plate element with its geometry, basis and matrices.
#[derive(Debug, Clone)]
pub struct PlateElement {
    pub variant: PlateVariant,
    pub geometry: ElementGeometry,
    pub basis: PlateBasis,
    pub material: PlateMaterial,
    pub quadrature: Quadrature,
    pub matrices: PlateElementMatrices,
}

/// Recovered fields at a point, in the element-local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateFields {
    pub w: f64,
    /// Rotations `(θ1, θ2)`.
    pub rotation: [f64; 2],
    /// Bending moments `(M11, M12, M22)`.
    pub moments: [f64; 3],
    /// Transverse shears `(Q1, Q2)`.
    pub shears: [f64; 2],
}

impl PlateFields {
    /// The same fields with vector/tensor components in the frame rotated by `r`
    /// (columns are the target axes in local components).
    pub fn rotated(&self, r: &Matrix2<f64>) -> PlateFields {
        let rot = r.transpose() * Point::new(self.rotation[0], self.rotation[1]);
        let m = Matrix2::new(self.moments[0], self.moments[1], self.moments[1], self.moments[2]);
        let mr = r.transpose() * m * r;
        let q = r.transpose() * Point::new(self.shears[0], self.shears[1]);
        PlateFields {
            w: self.w,
            rotation: [rot.x, rot.y],
            moments: [mr[(0, 0)], mr[(0, 1)], mr[(1, 1)]],
            shears: [q.x, q.y],
        }
    }
}

/// Block-diagonal DOF rotation with `u_local = Q u_global`.
pub fn plate_transform(frame: &LocalFrame) -> Mat12 {
    let rt = frame.rotation().transpose();
    let mut q = Mat12::zeros();
    for n in 0..4 {
        let c = 3 * n;
        q[(c, c)] = 1.0;
        for i in 0..2 {
            for j in 0..2 {
                q[(c + 1 + i, c + 1 + j)] = rt[(i, j)];
            }
        }
    }
    q
}

fn symmetrize(k: &mut Mat12) {
    let s = (*k + k.transpose()) * 0.5;
    *k = s;
}

fn mass_matrix(
    basis: &PlateBasis,
    pts: &[(Point, f64)],
    mat: &PlateMaterial,
    shapes: &[crate::plate_basis::PlateShapeSet],
) -> Mat12 {
    let rho_t = mat.rho * mat.t;
    let rho_r = if mat.rotary_inertia { mat.rho * mat.t.powi(3) / 12.0 } else { 0.0 };
    let mut m = Mat12::zeros();
    for ((_, w), s) in pts.iter().zip(shapes) {
        for i in 0..12 {
            for j in i..12 {
                let v = rho_t * s.n[i][W] * s.n[j][W]
                    + rho_r * (s.n[i][D1] * s.n[j][D1] + s.n[i][D2] * s.n[j][D2]);
                m[(i, j)] += v * w;
            }
        }
    }
    let _ = basis;
    for i in 0..12 {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

fn numerical_rank(h: &SMatrix<f64, STRAIN_PARAMS, STRAIN_PARAMS>) -> usize {
    let sv = h.svd(false, false).singular_values;
    let max = sv.max();
    sv.iter().filter(|v| **v > 1e-10 * max).count()
}

impl PlateElement {
    pub fn new(
        variant: PlateVariant,
        corners: &QuadCorners,
        material: PlateMaterial,
        quadrature: Quadrature,
    ) -> Result<Self> {
        material.validate()?;
        let geometry = ElementGeometry::new(*corners)?;
        let basis = PlateBasis::new(&geometry.local, material.rigidity())?;
        let pts = geometry.area_points(quadrature)?;
        let shapes: Vec<_> = pts.iter().map(|(p, _)| basis.eval_shape_functions(*p)).collect();
        let m = mass_matrix(&basis, &pts, &material, &shapes);
        let matrices = match variant {
            PlateVariant::Zdeq => zdeq_matrices(&basis, &pts, &shapes, &material, m),
            PlateVariant::Tfeq | PlateVariant::Jfeq => {
                hybrid_matrices(variant, &geometry, &basis, &pts, &material, m)?
            }
        };
        Ok(PlateElement {
            variant,
            geometry,
            basis,
            material,
            quadrature,
            matrices,
        })
    }

    pub fn transform(&self) -> Mat12 {
        plate_transform(&self.geometry.frame)
    }

    pub fn global_stiffness(&self) -> Mat12 {
        let q = self.transform();
        q.transpose() * self.matrices.k * q
    }

    pub fn global_mass(&self) -> Mat12 {
        let q = self.transform();
        q.transpose() * self.matrices.m * q
    }

    /// Equivalent nodal loads in global DOFs for nodal intensities `q`.
    pub fn global_load(&self, q: &[f64; 4]) -> Vec12 {
        let qv = nalgebra::Vector4::from_column_slice(q);
        self.transform().transpose() * (self.matrices.load * qv)
    }

    /// Trefftz parameters of the hybrid variants for local DOFs `u`.
    fn hybrid_parameters(&self, hy: &HybridData, u: &Vec12, q: &[f64; 4]) -> [f64; 12] {
        let qv = nalgebra::Vector4::from_column_slice(q);
        let c = hy.g * u - hy.gbar * qv;
        let mut full = [0.0; 12];
        for i in 0..STRAIN_PARAMS {
            full[i + 3] = c[i];
        }
        // Rigid terms: least-squares match of the nodal DOFs.
        let mut resid = [0.0; 12];
        for (node, p) in self.geometry.local.pts.iter().enumerate() {
            let f = self.hybrid_field(&full, q, *p);
            let t = nodal_triple(&f);
            for r in 0..3 {
                resid[3 * node + r] = u[3 * node + r] - t[r];
            }
        }
        let h = self.basis.scale();
        let mut a = SMatrix::<f64, 12, 3>::zeros();
        for (node, p) in self.geometry.local.pts.iter().enumerate() {
            let ps = p / h;
            a[(3 * node, 0)] = 1.0;
            a[(3 * node, 1)] = ps.x;
            a[(3 * node, 2)] = ps.y;
            a[(3 * node + 1, 2)] = 1.0 / h;
            a[(3 * node + 2, 1)] = -1.0 / h;
        }
        let rhs = SVector::<f64, 12>::from_column_slice(&resid);
        let ata = a.transpose() * a;
        if let Some(chol) = ata.cholesky() {
            let sol = chol.solve(&(a.transpose() * rhs));
            full[0] = sol[0];
            full[1] = sol[1];
            full[2] = sol[2];
        }
        full
    }

    fn hybrid_field(&self, c: &[f64; 12], q: &[f64; 4], p: Point) -> Derivs {
        let m = self.basis.monomials(p);
        let mb = self.basis.particular.eval(p);
        let mut out = [0.0; 10];
        for (j, mj) in m.iter().enumerate() {
            for k in 0..10 {
                out[k] += c[j] * mj[k];
            }
        }
        for (pj, mbj) in mb.iter().enumerate() {
            for k in 0..10 {
                out[k] += q[pj] * mbj[k];
            }
        }
        out
    }

    /// Field derivatives at a local point for local nodal DOFs.
    pub fn field_local(&self, u_local: &Vec12, q: &[f64; 4], p: Point) -> Derivs {
        match &self.matrices.hybrid {
            None => self.basis.field(p, u_local, q),
            Some(hy) => {
                let c = self.hybrid_parameters(hy, u_local, q);
                self.hybrid_field(&c, q, p)
            }
        }
    }

    /// Deflection, rotations, moments and shears at a local point.
    pub fn recover_internal_fields(&self, u_global: &Vec12, q: &[f64; 4], p: Point) -> PlateFields {
        let u = self.transform() * u_global;
        let d = self.field_local(&u, q, p);
        let (m11, m22, m12) = stress_couples(&d, self.material.rigidity(), self.material.nu);
        let dr = self.material.rigidity();
        PlateFields {
            w: d[W],
            rotation: [d[D2], -d[D1]],
            moments: [-m11, -m12, -m22],
            shears: [-dr * (d[D111] + d[D122]), -dr * (d[D112] + d[D222])],
        }
    }

    /// Recovered fields at a local point with components in global axes.
    pub fn recover_global(&self, u_global: &Vec12, q: &[f64; 4], p: Point) -> PlateFields {
        let local = self.recover_internal_fields(u_global, q, p);
        local.rotated(&self.geometry.frame.rotation().transpose())
    }
}

fn zdeq_matrices(
    basis: &PlateBasis,
    pts: &[(Point, f64)],
    shapes: &[crate::plate_basis::PlateShapeSet],
    mat: &PlateMaterial,
    m: Mat12,
) -> PlateElementMatrices {
    let d = mat.rigidity();
    let nu = mat.nu;
    let mut k = Mat12::zeros();
    let mut f2 = LoadMat::zeros();
    let mut f1 = LoadMat::zeros();
    let mut energy = Matrix4::zeros();
    for ((p, w), s) in pts.iter().zip(shapes) {
        let load = basis.particular.load_shape(*p);
        for i in 0..12 {
            for j in i..12 {
                k[(i, j)] += bending_energy(&s.n[i], &s.n[j], d, nu) * w;
            }
            for (col, lp) in load.iter().enumerate() {
                f2[(i, col)] += s.n[i][W] * lp * w;
                f1[(i, col)] += bending_energy(&s.n[i], &s.nbar[col], d, nu) * w;
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                energy[(a, b)] += bending_energy(&s.nbar[a], &s.nbar[b], d, nu) * w;
            }
        }
    }
    for i in 0..12 {
        for j in 0..i {
            k[(i, j)] = k[(j, i)];
        }
    }
    PlateElementMatrices {
        k,
        m,
        load: f2 - f1,
        f2,
        f1,
        energy,
        hybrid: None,
    }
}

fn hybrid_matrices(
    variant: PlateVariant,
    geometry: &ElementGeometry,
    basis: &PlateBasis,
    pts: &[(Point, f64)],
    mat: &PlateMaterial,
    m: Mat12,
) -> Result<PlateElementMatrices> {
    let d = mat.rigidity();
    let nu = mat.nu;
    let mut h = SMatrix::<f64, STRAIN_PARAMS, STRAIN_PARAMS>::zeros();
    let mut hbar = SMatrix::<f64, STRAIN_PARAMS, 4>::zeros();
    let mut t = SMatrix::<f64, STRAIN_PARAMS, 12>::zeros();
    let mut tbar = LoadMat::zeros();
    let mut energy = Matrix4::zeros();

    for (p, w) in pts {
        let mm = basis.monomials(*p);
        let mb = basis.particular.eval(*p);
        if variant == PlateVariant::Tfeq {
            for i in 0..STRAIN_PARAMS {
                for j in 0..STRAIN_PARAMS {
                    h[(i, j)] += bending_energy(&mm[i + 3], &mm[j + 3], d, nu) * w;
                }
                for (col, mbc) in mb.iter().enumerate() {
                    hbar[(i, col)] += bending_energy(&mm[i + 3], mbc, d, nu) * w;
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                energy[(a, b)] += bending_energy(&mb[a], &mb[b], d, nu) * w;
            }
        }
    }

    for edge in 0..4 {
        let frame = edge_frame_functions(&geometry.local, edge)?;
        let n = frame.geom.normal;
        for fp in &frame.points {
            let mm = basis.monomials(fp.point);
            let mb = basis.particular.eval(fp.point);
            let tr: Vec<[f64; 3]> = (0..STRAIN_PARAMS)
                .map(|i| traction_triple(&mm[i + 3], d, nu, n))
                .collect();
            for i in 0..STRAIN_PARAMS {
                for dof in 0..12 {
                    let v: f64 = (0..3).map(|r| tr[i][r] * fp.l[(r, dof)]).sum();
                    t[(i, dof)] += v * fp.weight;
                }
            }
            for (col, mbc) in mb.iter().enumerate() {
                let trb = traction_triple(mbc, d, nu, n);
                for dof in 0..12 {
                    let v: f64 = (0..3).map(|r| trb[r] * fp.l[(r, dof)]).sum();
                    tbar[(dof, col)] += v * fp.weight;
                }
            }
            if variant == PlateVariant::Jfeq {
                let traces: Vec<[f64; 3]> = (0..STRAIN_PARAMS)
                    .map(|i| boundary_trace(&mm[i + 3], n))
                    .collect();
                for i in 0..STRAIN_PARAMS {
                    for j in 0..STRAIN_PARAMS {
                        let v: f64 = (0..3)
                            .map(|r| traces[i][r] * tr[j][r] + traces[j][r] * tr[i][r])
                            .sum();
                        h[(i, j)] += 0.5 * v * fp.weight;
                    }
                    for (col, mbc) in mb.iter().enumerate() {
                        let trace = boundary_trace(mbc, n);
                        let v: f64 = (0..3).map(|r| tr[i][r] * trace[r]).sum();
                        hbar[(i, col)] += v * fp.weight;
                    }
                }
            }
        }
    }

    let hs = (h + h.transpose()) * 0.5;
    let chol = hs.cholesky().ok_or_else(|| FemError::SingularElement {
        rank: numerical_rank(&hs),
        size: STRAIN_PARAMS,
        reason: format!("{} flexibility matrix H is not positive definite", variant.name()),
    })?;
    let rank = numerical_rank(&hs);
    if rank < STRAIN_PARAMS {
        return Err(FemError::SingularElement {
            rank,
            size: STRAIN_PARAMS,
            reason: format!("{} flexibility matrix H is rank deficient", variant.name()),
        });
    }
    let g = chol.solve(&t);
    let gbar = chol.solve(&hbar);
    let mut k = t.transpose() * g;
    symmetrize(&mut k);
    let load = t.transpose() * gbar - tbar;
    Ok(PlateElementMatrices {
        k,
        m,
        load,
        f2: LoadMat::zeros(),
        f1: LoadMat::zeros(),
        energy,
        hybrid: Some(HybridData {
            h: hs,
            t,
            hbar,
            tbar,
            g,
            gbar,
        }),
    })
}
