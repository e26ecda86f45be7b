//! Element property checks on a single quadrilateral.

use nalgebra::{DMatrix, SMatrix};

use trefftz_fem::geometry::{gauss_rule, isoparametric_eval, Point, QuadCorners, Quadrature};
use trefftz_fem::membrane_element::{airy_biharmonic, MembraneElement, MembraneMaterial, MEMBRANE_PARAMS};
use trefftz_fem::plate_basis::{monomial_biharmonic, HOMOGENEOUS_EXPONENTS, D1, D11, D12, D2, D22, W};
use trefftz_fem::plate_elements::{PlateElement, PlateMaterial, PlateVariant, Vec12, STRAIN_PARAMS};

pub type Check = Result<(), String>;

pub const VARIANTS: [PlateVariant; 3] = [PlateVariant::Zdeq, PlateVariant::Tfeq, PlateVariant::Jfeq];

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn plate_material() -> PlateMaterial {
    PlateMaterial::new(1.0e4, 0.3, 0.1, 1.0).unwrap()
}

pub fn membrane_material() -> MembraneMaterial {
    MembraneMaterial {
        e: 1.0e3,
        nu: 0.25,
        t: 0.5,
        rho: 1.0,
    }
}

fn plate(v: PlateVariant, c: &QuadCorners) -> Result<PlateElement, String> {
    PlateElement::new(v, c, plate_material(), Quadrature::GAUSS3).map_err(|e| e.to_string())
}

fn membrane(c: &QuadCorners) -> Result<MembraneElement, String> {
    MembraneElement::new(c, membrane_material(), Quadrature::GAUSS3).map_err(|e| e.to_string())
}

pub fn sorted_eigs(k: &SMatrix<f64, 12, 12>) -> Vec<f64> {
    let mut e: Vec<f64> = k.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn asymmetry(k: &SMatrix<f64, 12, 12>) -> f64 {
    (k - k.transpose()).abs().max() / k.abs().max()
}

pub fn nullity(e: &[f64]) -> usize {
    let max = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    e.iter().filter(|v| v.abs() < 1e-9 * max).count()
}

pub fn rotate(c: &QuadCorners, angle: f64) -> QuadCorners {
    let (s, co) = angle.sin_cos();
    QuadCorners::new(c.pts.map(|p| Point::new(co * p.x - s * p.y, s * p.x + co * p.y))).unwrap()
}

/// Plain tensor Gauss integration over a quadrilateral.
fn integrate(corners: &QuadCorners, n: usize, f: &mut dyn FnMut(Point, f64)) {
    let rule = gauss_rule(n).unwrap();
    for (a, wa) in rule.nodes.iter().zip(&rule.weights) {
        for (b, wb) in rule.nodes.iter().zip(&rule.weights) {
            let iso = isoparametric_eval(corners, Point::new(*a, *b));
            f(iso.point, wa * wb * iso.det);
        }
    }
}

fn sample_points(c: &QuadCorners) -> Vec<Point> {
    [(-0.7, -0.3), (0.1, 0.2), (0.6, -0.8), (0.9, 0.9)]
        .iter()
        .map(|(s, t)| isoparametric_eval(c, Point::new(*s, *t)).point)
        .collect()
}

pub fn plate_symmetry_and_nullity(c: &QuadCorners) -> Check {
    for v in VARIANTS {
        let k = plate(v, c)?.global_stiffness();
        ensure!(asymmetry(&k) < 1e-10, "{v:?}: asymmetry {:e}", asymmetry(&k));
        let e = sorted_eigs(&k);
        ensure!(nullity(&e) == 3 && e[3] > 0.0, "{v:?}: spectrum {e:?}");
    }
    Ok(())
}

pub fn hybrid_stiffness_agreement(c: &QuadCorners) -> Check {
    let kt = plate(PlateVariant::Tfeq, c)?.global_stiffness();
    let kj = plate(PlateVariant::Jfeq, c)?.global_stiffness();
    let rel = (kt - kj).abs().max() / kt.abs().max();
    ensure!(rel <= 1e-6, "TFEQ/JFEQ stiffness differ by {rel:e}");
    Ok(())
}

/// Hybrid `H` of both variants against an independent 6 × 6 Gauss domain
/// integral of the bending energy.
pub fn hybrid_h_identity(c: &QuadCorners) -> Check {
    let mat = plate_material();
    let (d, nu) = (mat.rigidity(), mat.nu);
    for v in [PlateVariant::Tfeq, PlateVariant::Jfeq] {
        let el = plate(v, c)?;
        let h = &el.matrices.hybrid.as_ref().ok_or("no hybrid data")?.h;
        let mut oracle = DMatrix::<f64>::zeros(STRAIN_PARAMS, STRAIN_PARAMS);
        integrate(&el.geometry.local, 6, &mut |p, w| {
            let m = el.basis.monomials(p);
            for i in 0..STRAIN_PARAMS {
                for j in 0..STRAIN_PARAMS {
                    let (a, b) = (&m[i + 3], &m[j + 3]);
                    let e = a[D11] * b[D11]
                        + a[D22] * b[D22]
                        + nu * (a[D11] * b[D22] + a[D22] * b[D11])
                        + 2.0 * (1.0 - nu) * a[D12] * b[D12];
                    oracle[(i, j)] += d * e * w;
                }
            }
        });
        let scale = oracle.abs().max();
        for i in 0..STRAIN_PARAMS {
            for j in 0..STRAIN_PARAMS {
                let err = (h[(i, j)] - oracle[(i, j)]).abs() / scale;
                ensure!(err <= 1e-6, "{v:?} H({i},{j}) off by {err:e}");
            }
        }
    }
    Ok(())
}

/// Homogeneous plate and Airy terms are biharmonic; the particular terms
/// reproduce the interpolated load.
pub fn trefftz_residuals(c: &QuadCorners) -> Check {
    let el = plate(PlateVariant::Zdeq, c)?;
    let ps = &el.basis.particular;
    for p in sample_points(&el.geometry.local) {
        for (a, b) in HOMOGENEOUS_EXPONENTS {
            ensure!(monomial_biharmonic(a, b, p).abs() <= 1e-9, "x^{a} y^{b} not biharmonic");
        }
        for i in 0..MEMBRANE_PARAMS {
            ensure!(airy_biharmonic(i, p).abs() <= 1e-9, "Airy term {i} not biharmonic");
        }
        let res = ps.load_residual(p);
        let shape = ps.load_shape(p);
        for k in 0..4 {
            ensure!(
                (res[k] - shape[k]).abs() <= 1e-9 * (1.0 + shape[k].abs()),
                "load residual {k}: {} vs {}",
                res[k],
                shape[k]
            );
        }
        let s: f64 = shape.iter().sum();
        ensure!((s - 1.0).abs() <= 1e-9, "load shapes sum to {s}");
    }
    Ok(())
}

pub fn shape_derivatives(c: &QuadCorners) -> Check {
    let el = plate(PlateVariant::Zdeq, c)?;
    let h = 1e-5 * el.geometry.local.diameter();
    let ex = Point::new(h, 0.0);
    let ey = Point::new(0.0, h);
    for p in sample_points(&el.geometry.local) {
        let s = el.basis.eval_shape_functions(p);
        let (sxp, sxm) = (el.basis.eval_shape_functions(p + ex), el.basis.eval_shape_functions(p - ex));
        let (syp, sym) = (el.basis.eval_shape_functions(p + ey), el.basis.eval_shape_functions(p - ey));
        for dof in 0..12 {
            let scale = s.n[dof].iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let checks = [
                (D1, (sxp.n[dof][W] - sxm.n[dof][W]) / (2.0 * h)),
                (D2, (syp.n[dof][W] - sym.n[dof][W]) / (2.0 * h)),
                (D11, (sxp.n[dof][D1] - sxm.n[dof][D1]) / (2.0 * h)),
                (D12, (syp.n[dof][D1] - sym.n[dof][D1]) / (2.0 * h)),
                (D22, (syp.n[dof][D2] - sym.n[dof][D2]) / (2.0 * h)),
            ];
            for (slot, fd) in checks {
                let err = (s.n[dof][slot] - fd).abs() / scale;
                ensure!(err <= 1e-5, "dof {dof} slot {slot}: finite difference off by {err:e}");
            }
        }
    }
    Ok(())
}

pub fn plate_rotation_invariance(c: &QuadCorners, angle: f64) -> Check {
    for v in VARIANTS {
        let e0 = sorted_eigs(&plate(v, c)?.global_stiffness());
        let e1 = sorted_eigs(&plate(v, &rotate(c, angle))?.global_stiffness());
        for i in 3..12 {
            ensure!((e0[i] - e1[i]).abs() <= 1e-9 * e0[11], "{v:?} eigenvalue {i} changes under rotation");
        }
    }
    Ok(())
}

/// Nodal values of `w = ½k₀x² + k₁xy + ½k₂y²` recover constant moments.
pub fn plate_constant_curvature(c: &QuadCorners, k: [f64; 3]) -> Check {
    let mat = plate_material();
    let (d, nu) = (mat.rigidity(), mat.nu);
    let expect = [-d * (k[0] + nu * k[2]), -d * (1.0 - nu) * k[1], -d * (k[2] + nu * k[0])];
    for v in VARIANTS {
        let el = plate(v, c)?;
        let mut u = Vec12::zeros();
        for (n, p) in el.geometry.global.pts.iter().enumerate() {
            let (x, y) = (p.x, p.y);
            u[3 * n] = 0.5 * k[0] * x * x + k[1] * x * y + 0.5 * k[2] * y * y;
            u[3 * n + 1] = k[1] * x + k[2] * y;
            u[3 * n + 2] = -(k[0] * x + k[1] * y);
        }
        for p in sample_points(&el.geometry.local) {
            let f = el.recover_global(&u, &[0.0; 4], p);
            for i in 0..3 {
                ensure!(
                    (f.moments[i] - expect[i]).abs() <= 1e-8 * d,
                    "{v:?} moment {i}: {} vs {}",
                    f.moments[i],
                    expect[i]
                );
            }
        }
    }
    Ok(())
}

/// Symmetry, rotation invariance and the nullspace: rigid modes plus the
/// uniform drilling mode, which leaves every edge displacement untouched.
pub fn membrane_symmetry_and_nullity(c: &QuadCorners) -> Check {
    let k = membrane(c)?.global_stiffness();
    ensure!(asymmetry(&k) < 1e-10, "membrane asymmetry {:e}", asymmetry(&k));
    let e = sorted_eigs(&k);
    ensure!(nullity(&e) == 4, "membrane spectrum {e:?}");
    let mut spin = SMatrix::<f64, 12, 1>::zeros();
    for n in 0..4 {
        spin[3 * n + 2] = 1.0;
    }
    ensure!((k * spin).norm() <= 1e-9 * k.norm(), "uniform drilling mode carries energy");
    let e1 = sorted_eigs(&membrane(&rotate(c, 1.1))?.global_stiffness());
    for i in 4..12 {
        ensure!((e[i] - e1[i]).abs() <= 1e-9 * e[11], "membrane eigenvalue {i} changes under rotation");
    }
    Ok(())
}

/// Linear displacement `u = G x` with the matching drilling rotation gives
/// plane-stress forces everywhere.
pub fn membrane_constant_stress(c: &QuadCorners, g: [f64; 4]) -> Check {
    let m = membrane_material();
    let el = membrane(c)?;
    let mut u = SMatrix::<f64, 12, 1>::zeros();
    for (n, p) in el.geometry.global.pts.iter().enumerate() {
        u[3 * n] = g[0] * p.x + g[1] * p.y;
        u[3 * n + 1] = g[2] * p.x + g[3] * p.y;
        u[3 * n + 2] = 0.5 * (g[2] - g[1]);
    }
    let c0 = m.e * m.t / (1.0 - m.nu * m.nu);
    let expect = [
        c0 * (g[0] + m.nu * g[3]),
        c0 * 0.5 * (1.0 - m.nu) * (g[1] + g[2]),
        c0 * (g[3] + m.nu * g[0]),
    ];
    let scale = c0 * g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for p in sample_points(&el.geometry.local) {
        let f = el.recover_forces_global(&u, [0.0, 0.0], p);
        for i in 0..3 {
            ensure!((f[i] - expect[i]).abs() <= 1e-8 * scale, "force {i}: {} vs {}", f[i], expect[i]);
        }
    }
    Ok(())
}
