//! Trefftz trial basis of the quadrilateral Kirchhoff plate.
//!
//! The deflection inside an element is `w = M(x)·c + M̄(x)·q̄`, where the
//! twelve homogeneous monomials `M` are biharmonic and the four particular
//! functions `M̄` solve `D∇⁴w = q` for the bilinear load interpolant of the
//! nodal intensities `q̄`. Linking the twelve parameters `c` to the nodal
//! deflections and rotations gives the homogeneous shape functions
//! `N = M·B` (with `B = A⁻¹`) and the particular shape functions
//! `N̄ = M̄ − N·Ā`, which vanish together with their rotations at the corners.
//!
//! Nodal rotations follow the right-hand rule about the local axes:
//! `θ1 = ∂w/∂x2`, `θ2 = −∂w/∂x1`. Within a node the DOF order is
//! `(w, θ1, θ2)`; nodes are ordered (1)(2)(3)(4).

use nalgebra::{Matrix4, SMatrix, SVector};

use crate::error::{FemError, Result};
use crate::geometry::{Point, QuadCorners};

/// Value and partial derivatives of a scalar field up to third order.
pub type Derivs = [f64; 10];

pub const W: usize = 0;
pub const D1: usize = 1;
pub const D2: usize = 2;
pub const D11: usize = 3;
pub const D12: usize = 4;
pub const D22: usize = 5;
pub const D111: usize = 6;
pub const D112: usize = 7;
pub const D122: usize = 8;
pub const D222: usize = 9;

/// Exponents `(a, b)` of the homogeneous monomials `(x1)^a (x2)^b`.
pub const HOMOGENEOUS_EXPONENTS: [(u32, u32); 12] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (3, 1),
    (1, 3),
];

/// Particular monomials and their divisors: `D∇⁴` of each yields `1, x1, x2, x1·x2`.
pub const PARTICULAR_TERMS: [((u32, u32), f64); 4] =
    [((2, 2), 8.0), ((1, 4), 24.0), ((4, 1), 24.0), ((3, 3), 72.0)];

/// Largest accepted condition estimate of the interpolation matrix.
pub const MAX_CONDITION: f64 = 1e12;

fn falling(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).fold(1.0, |acc, v| acc * v as f64)
}

/// All derivatives up to third order of `x^a y^b` at `p`.
pub fn monomial_derivs(a: u32, b: u32, p: Point) -> Derivs {
    let orders: [(u32, u32); 10] = [
        (0, 0),
        (1, 0),
        (0, 1),
        (2, 0),
        (1, 1),
        (0, 2),
        (3, 0),
        (2, 1),
        (1, 2),
        (0, 3),
    ];
    let mut out = [0.0; 10];
    for (slot, &(i, j)) in orders.iter().enumerate() {
        if i > a || j > b {
            continue;
        }
        out[slot] =
            falling(a, i) * falling(b, j) * p.x.powi((a - i) as i32) * p.y.powi((b - j) as i32);
    }
    out
}

/// `∇⁴` of `x^a y^b` at `p` (fourth derivatives are not part of [`Derivs`]).
pub fn monomial_biharmonic(a: u32, b: u32, p: Point) -> f64 {
    let term = |i: u32, j: u32| {
        if i > a || j > b {
            0.0
        } else {
            falling(a, i) * falling(b, j) * p.x.powi((a - i) as i32) * p.y.powi((b - j) as i32)
        }
    };
    term(4, 0) + 2.0 * term(2, 2) + term(0, 4)
}

/// Homogeneous monomials evaluated at a local point.
pub fn eval_homogeneous(p: Point) -> [Derivs; 12] {
    HOMOGENEOUS_EXPONENTS.map(|(a, b)| monomial_derivs(a, b, p))
}

fn scale_derivs(d: &mut Derivs, h: f64) {
    let inv = 1.0 / h;
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    d[D1] *= inv;
    d[D2] *= inv;
    for k in [D11, D12, D22] {
        d[k] *= inv2;
    }
    for k in [D111, D112, D122, D222] {
        d[k] *= inv3;
    }
}

/// Nodal DOF triple `(w, θ1, θ2)` of a field from its derivatives.
pub fn nodal_triple(d: &Derivs) -> [f64; 3] {
    [d[W], d[D2], -d[D1]]
}

/// Particular functions `M̄_(p)` for the four nodal load intensities.
#[derive(Debug, Clone)]
pub struct ParticularSet {
    pub rigidity: f64,
    /// Inverse of the load-node matrix `[1 x1 x2 x1x2]` at the corners.
    pub load_inverse: Matrix4<f64>,
    pub corners: QuadCorners,
}

impl ParticularSet {
    /// Load-interpolation coefficients `c_q = Ā1⁻¹ q̄` in terms of nodal loads.
    pub fn new(corners_local: &QuadCorners, rigidity: f64) -> Result<Self> {
        if !(rigidity > 0.0) || !rigidity.is_finite() {
            return Err(FemError::InvalidArgument(format!(
                "plate rigidity {rigidity} must be positive"
            )));
        }
        let mut a = Matrix4::zeros();
        for (i, p) in corners_local.pts.iter().enumerate() {
            a[(i, 0)] = 1.0;
            a[(i, 1)] = p.x;
            a[(i, 2)] = p.y;
            a[(i, 3)] = p.x * p.y;
        }
        let svd = a.svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-13 * smax) {
            return Err(FemError::DegenerateLoadInterpolation(format!(
                "load-node matrix condition {:.3e}",
                smax / smin
            )));
        }
        let load_inverse = a
            .try_inverse()
            .ok_or_else(|| FemError::DegenerateLoadInterpolation("singular".into()))?;
        Ok(ParticularSet {
            rigidity,
            load_inverse,
            corners: *corners_local,
        })
    }

    /// Raw particular monomials divided by `8D, 24D, 24D, 72D`.
    pub fn raw(&self, p: Point) -> [Derivs; 4] {
        PARTICULAR_TERMS.map(|((a, b), div)| {
            let mut d = monomial_derivs(a, b, p);
            let s = 1.0 / (div * self.rigidity);
            d.iter_mut().for_each(|v| *v *= s);
            d
        })
    }

    /// `M̄_(p)`: particular field per unit nodal load intensity `(p)`.
    pub fn eval(&self, p: Point) -> [Derivs; 4] {
        let raw = self.raw(p);
        let mut out = [[0.0; 10]; 4];
        for (node, out_p) in out.iter_mut().enumerate() {
            for (q, raw_q) in raw.iter().enumerate() {
                let c = self.load_inverse[(q, node)];
                for k in 0..10 {
                    out_p[k] += c * raw_q[k];
                }
            }
        }
        out
    }

    /// `D∇⁴ M̄_(p)` evaluated from the fourth derivatives of the raw terms.
    pub fn load_residual(&self, p: Point) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (node, o) in out.iter_mut().enumerate() {
            for (q, ((a, b), div)) in PARTICULAR_TERMS.iter().enumerate() {
                *o += self.load_inverse[(q, node)] * monomial_biharmonic(*a, *b, p) / div;
            }
        }
        out
    }

    /// Bilinear load interpolation functions `N_(p)` at `p`.
    pub fn load_shape(&self, p: Point) -> [f64; 4] {
        let row = [1.0, p.x, p.y, p.x * p.y];
        let mut out = [0.0; 4];
        for (node, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|q| row[q] * self.load_inverse[(q, node)]).sum();
        }
        out
    }
}

/// Interpolation matrices of the modified geometrical interpolation.
///
/// Monomials are evaluated in coordinates scaled by `scale` (half the
/// element diameter) so the condition estimate reflects shape, not size.
#[derive(Debug, Clone)]
pub struct InterpolationMatrices {
    pub scale: f64,
    pub a: SMatrix<f64, 12, 12>,
    pub b: SMatrix<f64, 12, 12>,
    /// Particular functions and rotations at the corners (12 × 4).
    pub abar: SMatrix<f64, 12, 4>,
    pub condition: f64,
}

/// Builds `A`, `B = A⁻¹` and `Ā` for the given local corners.
pub fn build_interpolation(
    corners_local: &QuadCorners,
    particular: &ParticularSet,
) -> Result<InterpolationMatrices> {
    let scale = 0.5 * corners_local.diameter();
    let mut a = SMatrix::<f64, 12, 12>::zeros();
    let mut abar = SMatrix::<f64, 12, 4>::zeros();
    for (node, p) in corners_local.pts.iter().enumerate() {
        let ps = p / scale;
        for (m, (ea, eb)) in HOMOGENEOUS_EXPONENTS.iter().enumerate() {
            let t = nodal_triple(&monomial_derivs(*ea, *eb, ps));
            for r in 0..3 {
                a[(3 * node + r, m)] = t[r];
            }
        }
        let pb = particular.eval(*p);
        for (col, d) in pb.iter().enumerate() {
            let t = nodal_triple(d);
            for r in 0..3 {
                abar[(3 * node + r, col)] = t[r];
            }
        }
    }
    // Conditioning is judged on the scaled matrix; physical rotations are
    // the scaled ones divided by `scale`.
    let sv = a.svd(false, false).singular_values;
    let smin = sv.min();
    let condition = if smin > 0.0 { sv.max() / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(FemError::InterpolationFailure {
            condition,
            reason: "interpolation matrix A is (nearly) singular".into(),
        });
    }
    let mut b = a.lu().try_inverse().ok_or(FemError::InterpolationFailure {
        condition,
        reason: "LU factorization of A failed".into(),
    })?;
    for node in 0..4 {
        for r in 1..3 {
            b.column_mut(3 * node + r).scale_mut(scale);
            a.row_mut(3 * node + r).scale_mut(1.0 / scale);
        }
    }
    Ok(InterpolationMatrices {
        scale,
        a,
        b,
        abar,
        condition,
    })
}

/// Complete plate trial basis of one element in its local frame.
#[derive(Debug, Clone)]
pub struct PlateBasis {
    pub corners: QuadCorners,
    pub particular: ParticularSet,
    pub interp: InterpolationMatrices,
}

/// Shape functions at one point: 12 homogeneous, 4 particular.
#[derive(Debug, Clone, Copy)]
pub struct PlateShapeSet {
    pub n: [Derivs; 12],
    pub nbar: [Derivs; 4],
}

impl PlateBasis {
    pub fn new(corners_local: &QuadCorners, rigidity: f64) -> Result<Self> {
        let particular = ParticularSet::new(corners_local, rigidity)?;
        let interp = build_interpolation(corners_local, &particular)?;
        Ok(PlateBasis {
            corners: *corners_local,
            particular,
            interp,
        })
    }

    pub fn scale(&self) -> f64 {
        self.interp.scale
    }

    /// Homogeneous monomials in scaled coordinates, derivatives w.r.t. the
    /// physical local coordinates.
    pub fn monomials(&self, p: Point) -> [Derivs; 12] {
        let h = self.interp.scale;
        let mut m = eval_homogeneous(p / h);
        m.iter_mut().for_each(|d| scale_derivs(d, h));
        m
    }

    pub fn eval_shape_functions(&self, p: Point) -> PlateShapeSet {
        let m = self.monomials(p);
        let b = &self.interp.b;
        let mut n = [[0.0; 10]; 12];
        for (dof, n_dof) in n.iter_mut().enumerate() {
            for (j, m_j) in m.iter().enumerate() {
                let c = b[(j, dof)];
                if c != 0.0 {
                    for k in 0..10 {
                        n_dof[k] += m_j[k] * c;
                    }
                }
            }
        }
        let mut nbar = self.particular.eval(p);
        for (col, nb) in nbar.iter_mut().enumerate() {
            for (dof, n_dof) in n.iter().enumerate() {
                let c = self.interp.abar[(dof, col)];
                if c != 0.0 {
                    for k in 0..10 {
                        nb[k] -= n_dof[k] * c;
                    }
                }
            }
        }
        PlateShapeSet { n, nbar }
    }

    /// Field derivatives for nodal DOFs `u` (12) and nodal loads `q` (4).
    pub fn field(&self, p: Point, u: &SVector<f64, 12>, q: &[f64; 4]) -> Derivs {
        let s = self.eval_shape_functions(p);
        let mut out = [0.0; 10];
        for dof in 0..12 {
            for k in 0..10 {
                out[k] += s.n[dof][k] * u[dof];
            }
        }
        for (col, qv) in q.iter().enumerate() {
            for k in 0..10 {
                out[k] += s.nbar[col][k] * qv;
            }
        }
        out
    }
}
