//! Closed-form frame matrices and an ODE shooting oracle for member end
//! forces and whole frames.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use trefftz_fem::frame_element::{FrameLoads, FrameSection};

/// Space-frame stiffness in local DOFs `(u1, u2, u3, φ1, φ2, φ3)` per node
/// with `φ3 = u2'` and `φ2 = −u3'`.
pub fn closed_form_frame_stiffness(s: &FrameSection, l: f64) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(12, 12);
    let ea = s.e * s.area / l;
    let gj = s.shear_modulus() * s.it / l;
    for (i, j, v) in [(0, 0, ea), (6, 6, ea), (0, 6, -ea), (3, 3, gj), (9, 9, gj), (3, 9, -gj)] {
        k[(i, j)] = v;
        k[(j, i)] = v;
    }
    let bend = |ei: f64, sg: f64| {
        let c = ei / l.powi(3);
        [
            [12.0 * c, sg * 6.0 * l * c, -12.0 * c, sg * 6.0 * l * c],
            [sg * 6.0 * l * c, 4.0 * l * l * c, -sg * 6.0 * l * c, 2.0 * l * l * c],
            [-12.0 * c, -sg * 6.0 * l * c, 12.0 * c, -sg * 6.0 * l * c],
            [sg * 6.0 * l * c, 2.0 * l * l * c, -sg * 6.0 * l * c, 4.0 * l * l * c],
        ]
    };
    for (idx, m) in [([1, 5, 7, 11], bend(s.e * s.i3, 1.0)), ([2, 4, 8, 10], bend(s.e * s.i2, -1.0))] {
        for a in 0..4 {
            for b in 0..4 {
                k[(idx[a], idx[b])] = m[a][b];
            }
        }
    }
    k
}

/// Equivalent nodal loads of linearly varying member loads.
pub fn closed_form_frame_load(loads: &FrameLoads, l: f64) -> [f64; 12] {
    let mut f = [0.0; 12];
    let lin = |q: [f64; 2]| [l * (q[0] / 3.0 + q[1] / 6.0), l * (q[0] / 6.0 + q[1] / 3.0)];
    let bend = |q: [f64; 2]| {
        // Superposed triangles peaking at the first and at the second node.
        [
            l * (7.0 * q[0] + 3.0 * q[1]) / 20.0,
            l * l * (q[0] / 20.0 + q[1] / 30.0),
            l * (3.0 * q[0] + 7.0 * q[1]) / 20.0,
            -l * l * (q[0] / 30.0 + q[1] / 20.0),
        ]
    };
    let [a0, a1] = lin(loads.axial);
    let [t0, t1] = lin(loads.torque);
    let b2 = bend(loads.q2);
    let b3 = bend(loads.q3);
    f[0] = a0;
    f[6] = a1;
    f[3] = t0;
    f[9] = t1;
    f[1] = b2[0];
    f[5] = b2[1];
    f[7] = b2[2];
    f[11] = b2[3];
    f[2] = b3[0];
    f[4] = -b3[1];
    f[8] = b3[2];
    f[10] = -b3[3];
    f
}

const RK_STEPS: usize = 400;

/// Integrates `y' = A y + b(x)` for the chain `y_k' = y_{k+1}`,
/// `y_last' = g(x)` by classical Runge-Kutta.
fn integrate_chain(y0: &[f64], l: f64, g: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let n = y0.len();
    let rhs = |x: f64, y: &[f64]| -> Vec<f64> {
        let mut d: Vec<f64> = y[1..].to_vec();
        d.push(g(x));
        d
    };
    let h = l / RK_STEPS as f64;
    let mut y = y0.to_vec();
    for s in 0..RK_STEPS {
        let x = s as f64 * h;
        let k1 = rhs(x, &y);
        let y2: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k1[i]).collect();
        let k2 = rhs(x + 0.5 * h, &y2);
        let y3: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k2[i]).collect();
        let k3 = rhs(x + 0.5 * h, &y3);
        let y4: Vec<f64> = (0..n).map(|i| y[i] + h * k3[i]).collect();
        let k4 = rhs(x + h, &y4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// Solves `y^(n) = g(x)` on `[0, l]` with the lower half of the state given at
/// both ends; returns the full state at both ends.
fn shoot(known0: &[f64], known_l: &[f64], l: f64, g: &dyn Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let m = known0.len();
    let n = 2 * m;
    let start = |free: &[f64]| -> Vec<f64> { known0.iter().chain(free).copied().collect() };
    let zero = |_: f64| 0.0;
    let base = integrate_chain(&start(&vec![0.0; m]), l, g);
    let mut a = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        let y: Vec<f64> = std::iter::repeat(0.0).take(m).chain(e).collect();
        let out = integrate_chain(&y, l, &zero);
        for i in 0..m {
            a[(i, j)] = out[i];
        }
    }
    let rhs = DVector::from_iterator(m, (0..m).map(|i| known_l[i] - base[i]));
    let free = a.lu().solve(&rhs).expect("regular shooting matrix");
    let y0 = start(free.as_slice());
    let yl = integrate_chain(&y0, l, g);
    assert_eq!(yl.len(), n);
    (y0, yl)
}

/// Member end forces conjugate to the local DOFs, `K d − f_eq`, from the
/// differential equations of the member alone.
pub fn oracle_end_forces(s: &FrameSection, l: f64, d: &[f64; 12], loads: &FrameLoads) -> [f64; 12] {
    let linear = |q: [f64; 2]| move |x: f64| q[0] + (q[1] - q[0]) * x / l;
    let mut f = [0.0; 12];

    // EA u'' = −n and G It φ'' = −m.
    for (i0, i1, stiff, q) in [(0, 6, s.e * s.area, loads.axial), (3, 9, s.shear_modulus() * s.it, loads.torque)] {
        let load = linear(q);
        let (y0, yl) = shoot(&[d[i0]], &[d[i1]], l, &|x| -load(x) / stiff);
        f[i0] = -stiff * y0[1];
        f[i1] = stiff * yl[1];
    }

    // EI w'''' = q; in the 1–3 plane the rotation DOF is −w'.
    for (iw, ir, sign, stiff, q) in [
        ([1, 7], [5, 11], 1.0, s.e * s.i3, loads.q2),
        ([2, 8], [4, 10], -1.0, s.e * s.i2, loads.q3),
    ] {
        let load = linear(q);
        let (y0, yl) = shoot(
            &[d[iw[0]], sign * d[ir[0]]],
            &[d[iw[1]], sign * d[ir[1]]],
            l,
            &|x| load(x) / stiff,
        );
        f[iw[0]] = stiff * y0[3];
        f[iw[1]] = -stiff * yl[3];
        f[ir[0]] = -sign * stiff * y0[2];
        f[ir[1]] = sign * stiff * yl[2];
    }
    f
}

/// Triad with rows `e1` along the member and `e2` in the plane of `e1` and
/// the orientation vector.
pub fn oracle_triad(a: Vector3<f64>, b: Vector3<f64>, v: Vector3<f64>) -> Matrix3<f64> {
    let e1 = (b - a).normalize();
    let e2 = (v - e1 * v.dot(&e1)).normalize();
    let e3 = e1.cross(&e2);
    Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()])
}

#[derive(Debug, Clone)]
pub struct OracleMember {
    pub nodes: [usize; 2],
    pub section: FrameSection,
    pub loads: FrameLoads,
    pub orientation: Vector3<f64>,
}

/// Nodal displacements `(ux, uy, uz, rx, ry, rz)` of a space frame, assembled
/// from oracle member end forces and solved densely.
pub fn oracle_frame_solve(
    coords: &[Vector3<f64>],
    members: &[OracleMember],
    clamped: &[usize],
    nodal_loads: &[(usize, [f64; 6])],
) -> Vec<[f64; 6]> {
    let n = 6 * coords.len();
    let mut k = DMatrix::zeros(n, n);
    let mut f = DVector::zeros(n);
    for m in members {
        let (a, b) = (coords[m.nodes[0]], coords[m.nodes[1]]);
        let l = (b - a).norm();
        let r = oracle_triad(a, b, m.orientation);
        let mut t = DMatrix::zeros(12, 12);
        for blk in 0..4 {
            t.view_mut((3 * blk, 3 * blk), (3, 3)).copy_from(&r);
        }
        let mut kl = DMatrix::zeros(12, 12);
        for j in 0..12 {
            let mut d = [0.0; 12];
            d[j] = 1.0;
            let col = oracle_end_forces(&m.section, l, &d, &FrameLoads::default());
            for i in 0..12 {
                kl[(i, j)] = col[i];
            }
        }
        let f0 = DVector::from_column_slice(&oracle_end_forces(&m.section, l, &[0.0; 12], &m.loads));
        let kg = t.transpose() * kl * &t;
        let fg = t.transpose() * f0;
        let eq: Vec<usize> = m.nodes.iter().flat_map(|nd| (0..6).map(move |c| 6 * nd + c)).collect();
        for (i, gi) in eq.iter().enumerate() {
            f[*gi] -= fg[i];
            for (j, gj) in eq.iter().enumerate() {
                k[(*gi, *gj)] += kg[(i, j)];
            }
        }
    }
    for (node, p) in nodal_loads {
        for c in 0..6 {
            f[6 * node + c] += p[c];
        }
    }
    let free: Vec<usize> = (0..n).filter(|i| !clamped.contains(&(i / 6))).collect();
    let kf = DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let ff = DVector::from_iterator(free.len(), free.iter().map(|i| f[*i]));
    let uf = kf.lu().solve(&ff).expect("regular frame");
    let mut u = vec![[0.0; 6]; coords.len()];
    for (i, g) in free.iter().enumerate() {
        u[g / 6][g % 6] = uf[i];
    }
    u
}
