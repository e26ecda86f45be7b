//! Static and eigenvalue solvers plus plate post-processing.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};

use crate::error::{FemError, Result};
use crate::model::{AssembledSystem, ComputedElement, DofMap, ElementKernel, Model, Skyline, SystemMatrix};
use crate::plate_elements::Vec12;

#[derive(Debug, Clone)]
pub struct StaticSolution {
    /// Full DOF vector, constrained entries hold their prescribed values.
    pub u: DVector<f64>,
    /// `‖K u − F‖ / ‖F‖` on the free DOFs (absolute when `F = 0`).
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Eigenvalues `ω²`, ascending.
    pub values: Vec<f64>,
    /// Mass-orthonormal modes on the full DOF vector (one column per value).
    pub modes: DMatrix<f64>,
    /// Multiplicity of each value within the cluster it belongs to.
    pub multiplicity: Vec<usize>,
}

impl EigenSolution {
    /// Angular frequencies `ω`; tiny negative roundoff maps to zero.
    pub fn omegas(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.max(0.0).sqrt()).collect()
    }
}

const SINGULAR_HINT: &str = "stiffness is not positive definite; check that the constraints suppress all rigid-body motions";

/// First pivot at which an `LLᵀ` factorization breaks down.
fn failing_pivot(a: &DMatrix<f64>) -> usize {
    let n = a.nrows();
    let mut l = a.clone();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for j in 0..n {
        let mut d = l[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 1e-14 * scale || !d.is_finite() {
            return j;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = l[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    n
}

/// Relative pivot threshold below which a factorization is declared singular.
const PIVOT_TOL: f64 = 1e-13;

fn dense_cholesky(a: &DMatrix<f64>) -> std::result::Result<nalgebra::Cholesky<f64, nalgebra::Dyn>, usize> {
    let chol = a.clone().cholesky().ok_or_else(|| failing_pivot(a))?;
    // Reject numerically singular pivots that happen to stay positive.
    let l = chol.l_dirty();
    for i in 0..a.nrows() {
        let d = a[(i, i)].abs().max(f64::MIN_POSITIVE);
        if l[(i, i)] * l[(i, i)] <= PIVOT_TOL * d {
            return Err(i);
        }
    }
    Ok(chol)
}

/// In-place `UᵀU` factorization of a skyline matrix.
pub fn skyline_cholesky(s: &mut Skyline) -> Result<()> {
    let n = s.dim();
    for j in 0..n {
        let fj = s.first[j];
        let oj = s.offsets[j];
        let diag0 = s.values[oj + j - fj];
        for i in fj..=j {
            let fi = s.first[i];
            let oi = s.offsets[i];
            let k0 = fi.max(fj);
            let mut v = s.values[oj + i - fj];
            for k in k0..i {
                v -= s.values[oi + k - fi] * s.values[oj + k - fj];
            }
            if i < j {
                v /= s.values[oi + i - fi];
                s.values[oj + i - fj] = v;
            } else {
                if v <= PIVOT_TOL * diag0.abs() || !v.is_finite() {
                    return Err(FemError::SingularSystem {
                        pivot: j,
                        hint: SINGULAR_HINT.into(),
                    });
                }
                s.values[oj + j - fj] = v.sqrt();
            }
        }
    }
    Ok(())
}

/// Solves `UᵀU x = b` with a factor from [`skyline_cholesky`].
pub fn skyline_solve(u: &Skyline, b: &DVector<f64>) -> DVector<f64> {
    let n = u.dim();
    let mut y = b.clone();
    for j in 0..n {
        let fj = u.first[j];
        let oj = u.offsets[j];
        let mut v = y[j];
        for k in fj..j {
            v -= u.values[oj + k - fj] * y[k];
        }
        y[j] = v / u.values[oj + j - fj];
    }
    for j in (0..n).rev() {
        let fj = u.first[j];
        let oj = u.offsets[j];
        y[j] /= u.values[oj + j - fj];
        let yj = y[j];
        for k in fj..j {
            y[k] -= u.values[oj + k - fj] * yj;
        }
    }
    y
}

pub fn solve_static(system: &AssembledSystem) -> Result<StaticSolution> {
    let f = &system.f;
    let x = match &system.k {
        SystemMatrix::Dense(k) => {
            let chol = dense_cholesky(k).map_err(|pivot| FemError::SingularSystem {
                pivot,
                hint: SINGULAR_HINT.into(),
            })?;
            chol.solve(f)
        }
        SystemMatrix::Skyline(k) => {
            let mut fac = k.clone();
            skyline_cholesky(&mut fac)?;
            skyline_solve(&fac, f)
        }
    };
    let r = system.k.mul_vec(&x) - f;
    let fnorm = f.norm();
    let residual = if fnorm > 0.0 { r.norm() / fnorm } else { r.norm() };
    Ok(StaticSolution {
        u: system.map.expand(&x),
        residual,
    })
}

/// Relative gap under which neighbouring eigenvalues count as repeated.
const CLUSTER_TOL: f64 = 1e-6;

pub fn solve_eigen(system: &AssembledSystem, p: usize) -> Result<EigenSolution> {
    let n = system.map.n_free;
    if p == 0 || p > n {
        return Err(FemError::InvalidArgument(format!(
            "eigenvalue count {p} outside 1..={n}"
        )));
    }
    let k = system.k.to_dense();
    let m = system.m.to_dense();
    let chol = dense_cholesky(&m).map_err(|pivot| FemError::MassMatrix { pivot })?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ
    let y = l.solve_lower_triangular(&k).expect("nonsingular factor");
    let c = l.solve_lower_triangular(&y.transpose()).expect("nonsingular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let values: Vec<f64> = order.iter().take(p).map(|i| eig.eigenvalues[*i]).collect();
    let lt = l.transpose();
    let mut modes = DMatrix::zeros(system.map.total(), p);
    for (col, i) in order.iter().take(p).enumerate() {
        let phi = lt
            .solve_upper_triangular(&eig.eigenvectors.column(*i).into_owned())
            .expect("nonsingular factor");
        // Constrained entries of a mode are zero, not the static prescribed values.
        let mut full = DVector::zeros(system.map.total());
        for (eq, fr) in system.map.free.iter().enumerate() {
            if let Some(fr) = fr {
                full[eq] = phi[*fr];
            }
        }
        modes.set_column(col, &full);
    }
    let all: Vec<f64> = order.iter().map(|i| eig.eigenvalues[*i]).collect();
    let scale = all.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let same = |a: f64, b: f64| (a - b).abs() <= CLUSTER_TOL * a.abs().max(b.abs()).max(1e-12 * scale);
    let multiplicity = (0..p)
        .map(|i| {
            let lo = (0..=i).rev().take_while(|j| same(all[*j], all[i])).count();
            let hi = (i + 1..n).take_while(|j| same(all[*j], all[i])).count();
            lo + hi
        })
        .collect();
    Ok(EigenSolution {
        values,
        modes,
        multiplicity,
    })
}

/// Nodal-averaged plate results in global axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateNodalResult {
    pub node: usize,
    pub w: f64,
    /// `(M11, M12, M22)`.
    pub moments: [f64; 3],
    /// `(Q1, Q2)`.
    pub shears: [f64; 2],
    /// `(m_max, m_min)` of the averaged moment tensor.
    pub principal: [f64; 2],
    /// Number of incident plate elements averaged.
    pub count: usize,
}

pub fn principal_moments(m: [f64; 3]) -> [f64; 2] {
    let t = Matrix2::new(m[0], m[1], m[1], m[2]);
    let e = t.symmetric_eigenvalues();
    [e.max(), e.min()]
}

/// Element-corner recovery followed by unweighted nodal averaging.
pub fn postprocess_plate(model: &Model, elements: &[ComputedElement], u_full: &DVector<f64>) -> Vec<PlateNodalResult> {
    let mut acc = vec![([0.0; 6], 0usize); model.nodes.len()];
    for (el, def) in elements.iter().zip(&model.elements) {
        let ElementKernel::Plate(plate) = &el.kernel else { continue };
        let ue = el.gather(u_full);
        let ue = Vec12::from_column_slice(ue.as_slice());
        let q = def.pressure.unwrap_or([0.0; 4]);
        for (k, node) in el.nodes.iter().enumerate() {
            let f = plate.recover_global(&ue, &q, plate.geometry.local.pts[k]);
            let vals = [f.w, f.moments[0], f.moments[1], f.moments[2], f.shears[0], f.shears[1]];
            let (sum, count) = &mut acc[*node];
            for (s, v) in sum.iter_mut().zip(vals) {
                *s += v;
            }
            *count += 1;
        }
    }
    acc.iter()
        .enumerate()
        .filter(|(_, (_, c))| *c > 0)
        .map(|(node, (s, c))| {
            let a: Vec<f64> = s.iter().map(|v| v / *c as f64).collect();
            let moments = [a[1], a[2], a[3]];
            PlateNodalResult {
                node,
                w: a[0],
                moments,
                shears: [a[4], a[5]],
                principal: principal_moments(moments),
                count: *c,
            }
        })
        .collect()
}

/// Nondimensional forms used by the benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `w D / (q0 a⁴)`.
    Deflection { q0: f64, a: f64, d: f64 },
    /// `m / (q0 a²)`.
    Moment { q0: f64, a: f64 },
    /// `q / (q0 a)`.
    Shear { q0: f64, a: f64 },
    /// `ω (a/π)² √(ρh/D)`.
    SquareFrequency { a: f64, rho_h: f64, d: f64 },
    /// `λ = √(ω R² √(ρh/D))`.
    CircularFrequency { r: f64, rho_h: f64, d: f64 },
    /// `ω / √(D / (ρh a⁴))`.
    PlateFrequency { a: f64, rho_h: f64, d: f64 },
}

impl Normalization {
    fn refs(&self) -> Vec<f64> {
        match *self {
            Normalization::Deflection { q0, a, d } => vec![q0, a, d],
            Normalization::Moment { q0, a } | Normalization::Shear { q0, a } => vec![q0, a],
            Normalization::SquareFrequency { a, rho_h, d }
            | Normalization::CircularFrequency { r: a, rho_h, d }
            | Normalization::PlateFrequency { a, rho_h, d } => vec![a, rho_h, d],
        }
    }

    pub fn apply(&self, value: f64) -> Result<f64> {
        if self.refs().iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(FemError::InvalidArgument(format!(
                "normalization needs positive reference values: {self:?}"
            )));
        }
        Ok(match *self {
            Normalization::Deflection { q0, a, d } => value * d / (q0 * a.powi(4)),
            Normalization::Moment { q0, a } => value / (q0 * a * a),
            Normalization::Shear { q0, a } => value / (q0 * a),
            Normalization::SquareFrequency { a, rho_h, d } => {
                value * (a / std::f64::consts::PI).powi(2) * (rho_h / d).sqrt()
            }
            Normalization::CircularFrequency { r, rho_h, d } => (value * r * r * (rho_h / d).sqrt()).sqrt(),
            Normalization::PlateFrequency { a, rho_h, d } => value / (d / (rho_h * a.powi(4))).sqrt(),
        })
    }
}

/// Free-DOF mass-orthonormality defect `max |φᵢᵀ M φⱼ − δᵢⱼ|`.
pub fn orthonormality_defect(system: &AssembledSystem, eig: &EigenSolution) -> f64 {
    let phi = free_modes(&system.map, &eig.modes);
    let m = system.m.to_dense();
    let g = phi.transpose() * m * &phi;
    (g - DMatrix::identity(eig.values.len(), eig.values.len())).amax()
}

fn free_modes(map: &DofMap, modes: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(map.n_free, modes.ncols());
    for c in 0..modes.ncols() {
        out.set_column(c, &map.restrict(&modes.column(c).into_owned()));
    }
    out
}
