//! Element geometry: quadrilateral corners, the bilinear isoparametric map,
//! Gauss–Legendre quadrature and the centroid-anchored local Cartesian frame.
//!
//! The local frame of a quadrilateral is built from the base vectors of the
//! isoparametric map evaluated at the element centre `θ = (0, 0)`: the first
//! axis follows the covariant vector `g1`, the second axis follows the
//! contravariant vector `g²`, which is perpendicular to `g1` by duality. The
//! origin sits at the area centroid. Trial functions are written in this
//! frame so the element does not depend on node numbering or on the global
//! orientation of the mesh.

use nalgebra::{Matrix2, Vector2};

use crate::error::{FemError, Result};

pub type Point = Vector2<f64>;

/// Four corner points in counter-clockwise order (1)(2)(3)(4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCorners {
    pub pts: [Point; 4],
}

impl QuadCorners {
    /// Validates distinct corners and a positive (counter-clockwise) area.
    pub fn new(pts: [Point; 4]) -> Result<Self> {
        let quad = QuadCorners { pts };
        let scale = quad.diameter();
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (pts[i] - pts[j]).norm() <= 1e-12 * scale.max(1e-300) {
                    return Err(FemError::DegenerateGeometry(format!(
                        "corners {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let area = quad.signed_area();
        if !(area > 1e-14 * scale * scale) {
            return Err(FemError::DegenerateGeometry(format!(
                "signed area {area:.6e} is not positive (corners must be counter-clockwise)"
            )));
        }
        Ok(quad)
    }

    pub fn from_xy(xy: [[f64; 2]; 4]) -> Result<Self> {
        Self::new(xy.map(|p| Point::new(p[0], p[1])))
    }

    /// Shoelace area; positive for counter-clockwise ordering.
    pub fn signed_area(&self) -> f64 {
        let p = &self.pts;
        0.5 * (0..4)
            .map(|i| {
                let a = p[i];
                let b = p[(i + 1) % 4];
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
    }

    pub fn diameter(&self) -> f64 {
        let p = &self.pts;
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                d = d.max((p[i] - p[j]).norm());
            }
        }
        d
    }

    /// True when every interior angle turns left (strictly convex).
    pub fn is_convex(&self) -> bool {
        let p = &self.pts;
        (0..4).all(|i| {
            let a = p[(i + 3) % 4];
            let b = p[i];
            let c = p[(i + 1) % 4];
            let u = b - a;
            let v = c - b;
            u.x * v.y - u.y * v.x > 0.0
        })
    }

    /// Edge `k` (0-based) runs from corner `k` to corner `k + 1`.
    pub fn edge(&self, k: usize) -> (Point, Point) {
        (self.pts[k % 4], self.pts[(k + 1) % 4])
    }

    pub fn vertex_average(&self) -> Point {
        (self.pts[0] + self.pts[1] + self.pts[2] + self.pts[3]) / 4.0
    }
}

/// Bilinear shape functions of the isoparametric map at `θ`.
pub fn bilinear_shape(theta: Point) -> [f64; 4] {
    let (s, t) = (theta.x, theta.y);
    [
        0.25 * (1.0 - s) * (1.0 - t),
        0.25 * (1.0 + s) * (1.0 - t),
        0.25 * (1.0 + s) * (1.0 + t),
        0.25 * (1.0 - s) * (1.0 + t),
    ]
}

/// Result of evaluating the isoparametric map at one natural point.
#[derive(Debug, Clone, Copy)]
pub struct IsoPoint {
    pub point: Point,
    /// Rows are the covariant base vectors `g1`, `g2`.
    pub covariant: Matrix2<f64>,
    pub det: f64,
}

/// Evaluates the bilinear map, its covariant basis and the jacobian determinant.
pub fn isoparametric_eval(corners: &QuadCorners, theta: Point) -> IsoPoint {
    let n = bilinear_shape(theta);
    let (s, t) = (theta.x, theta.y);
    let dn_ds = [-(1.0 - t), 1.0 - t, 1.0 + t, -(1.0 + t)];
    let dn_dt = [-(1.0 - s), -(1.0 + s), 1.0 + s, 1.0 - s];
    let mut point = Point::zeros();
    let mut g1 = Point::zeros();
    let mut g2 = Point::zeros();
    for i in 0..4 {
        point += corners.pts[i] * n[i];
        g1 += corners.pts[i] * (0.25 * dn_ds[i]);
        g2 += corners.pts[i] * (0.25 * dn_dt[i]);
    }
    let covariant = Matrix2::new(g1.x, g1.y, g2.x, g2.y);
    let det = g1.x * g2.y - g1.y * g2.x;
    IsoPoint {
        point,
        covariant,
        det,
    }
}

/// One-dimensional Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Tensor-product points `(θ, weight)` over the biunit square.
    pub fn square_points(&self) -> Vec<(Point, f64)> {
        let mut out = Vec::with_capacity(self.len() * self.len());
        for (i, &wi) in self.weights.iter().enumerate() {
            for (j, &wj) in self.weights.iter().enumerate() {
                out.push((Point::new(self.nodes[i], self.nodes[j]), wi * wj));
            }
        }
        out
    }
}

/// Gauss–Legendre rule with `n` points, `1 <= n <= 10`.
pub fn gauss_rule(n: usize) -> Result<GaussRule> {
    if !(1..=10).contains(&n) {
        return Err(FemError::InvalidArgument(format!(
            "Gauss rule order {n} outside 1..=10"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-type initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(GaussRule { nodes, weights })
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Area quadrature order used for element integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature(usize);

impl Quadrature {
    /// 3×3 Gauss, the default for every area integral.
    pub const GAUSS3: Quadrature = Quadrature(3);
    /// Order that integrates every polynomial integrand of the elements
    /// in this crate exactly on bilinear geometry (plate mass: degree 9).
    pub const EXACT: Quadrature = Quadrature(6);

    pub fn gauss(n: usize) -> Result<Quadrature> {
        gauss_rule(n)?;
        Ok(Quadrature(n))
    }

    pub fn order(self) -> usize {
        self.0
    }

    pub fn rule(self) -> GaussRule {
        gauss_rule(self.0).expect("quadrature order validated at construction")
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::GAUSS3
    }
}

/// Area centroid of the quadrilateral from the exact bilinear-map integral.
pub fn compute_centroid(corners: &QuadCorners) -> Result<Point> {
    let rule = gauss_rule(3)?;
    let mut area = 0.0;
    let mut moment = Point::zeros();
    for (theta, w) in rule.square_points() {
        let iso = isoparametric_eval(corners, theta);
        area += iso.det * w;
        moment += iso.point * (iso.det * w);
    }
    if !(area > 0.0) || !area.is_finite() {
        return Err(FemError::DegenerateGeometry(format!(
            "element area {area:.6e} is not positive"
        )));
    }
    Ok(moment / area)
}

/// Centroid-anchored orthonormal frame of an element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub centroid: Point,
    pub e1: Point,
    pub e2: Point,
    /// Angle from the global first axis to `e1`, radians.
    pub angle: f64,
}

impl LocalFrame {
    /// Columns are `e1`, `e2`: global = R · local.
    pub fn rotation(&self) -> Matrix2<f64> {
        Matrix2::new(self.e1.x, self.e2.x, self.e1.y, self.e2.y)
    }

    pub fn to_local_point(&self, p: Point) -> Point {
        let d = p - self.centroid;
        Point::new(d.dot(&self.e1), d.dot(&self.e2))
    }

    pub fn to_global_point(&self, p: Point) -> Point {
        self.centroid + self.e1 * p.x + self.e2 * p.y
    }

    pub fn vector_to_local(&self, v: Point) -> Point {
        Point::new(v.dot(&self.e1), v.dot(&self.e2))
    }

    pub fn vector_to_global(&self, v: Point) -> Point {
        self.e1 * v.x + self.e2 * v.y
    }

    /// Checks orthonormality to within `1e-12`.
    pub fn validate(&self) -> Result<()> {
        let ok = (self.e1.norm() - 1.0).abs() <= 1e-12
            && (self.e2.norm() - 1.0).abs() <= 1e-12
            && self.e1.dot(&self.e2).abs() <= 1e-12;
        if ok {
            Ok(())
        } else {
            Err(FemError::InvalidFrame(format!(
                "axes e1={:?} e2={:?} are not orthonormal",
                self.e1, self.e2
            )))
        }
    }
}

/// Builds the local frame from the base vectors at the element centre.
pub fn compute_local_frame(corners: &QuadCorners) -> Result<LocalFrame> {
    let centroid = compute_centroid(corners)?;
    let iso = isoparametric_eval(corners, Point::zeros());
    let g1 = Point::new(iso.covariant[(0, 0)], iso.covariant[(0, 1)]);
    let g2 = Point::new(iso.covariant[(1, 0)], iso.covariant[(1, 1)]);
    let metric = Matrix2::new(g1.dot(&g1), g1.dot(&g2), g2.dot(&g1), g2.dot(&g2));
    let scale = metric[(0, 0)].max(metric[(1, 1)]);
    let det = metric.determinant();
    if !(det > 1e-12 * scale * scale) {
        return Err(FemError::DegenerateGeometry(format!(
            "singular metric at element centre (det {det:.3e})"
        )));
    }
    let contra_metric = metric
        .try_inverse()
        .ok_or_else(|| FemError::DegenerateGeometry("singular metric".into()))?;
    // g^β = g^{αβ} g_α
    let g_sup2 = g1 * contra_metric[(0, 1)] + g2 * contra_metric[(1, 1)];
    let e1 = g1 / g1.norm();
    let e2 = g_sup2 / g_sup2.norm();
    let frame = LocalFrame {
        centroid,
        e1,
        e2,
        angle: e1.y.atan2(e1.x),
    };
    Ok(frame)
}

/// Corner coordinates expressed in the element's local frame.
pub fn to_local(corners: &QuadCorners, frame: &LocalFrame) -> QuadCorners {
    QuadCorners {
        pts: corners.pts.map(|p| frame.to_local_point(p)),
    }
}

/// Geometry bundle shared by the quadrilateral elements.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub global: QuadCorners,
    pub frame: LocalFrame,
    pub local: QuadCorners,
}

impl ElementGeometry {
    pub fn new(global: QuadCorners) -> Result<Self> {
        let frame = compute_local_frame(&global)?;
        let local = to_local(&global, &frame);
        Ok(ElementGeometry {
            global,
            frame,
            local,
        })
    }

    pub fn area(&self) -> f64 {
        self.global.signed_area()
    }

    /// Quadrature points over the element: local point and `det J · weight`.
    pub fn area_points(&self, quad: Quadrature) -> Result<Vec<(Point, f64)>> {
        let rule = quad.rule();
        let mut pts = Vec::with_capacity(rule.len() * rule.len());
        for (theta, w) in rule.square_points() {
            let iso = isoparametric_eval(&self.local, theta);
            if !(iso.det > 0.0) {
                return Err(FemError::DegenerateGeometry(format!(
                    "non-positive jacobian {:.3e} at θ=({:.3},{:.3})",
                    iso.det, theta.x, theta.y
                )));
            }
            pts.push((iso.point, iso.det * w));
        }
        Ok(pts)
    }
}

/// Straight edge of a local polygon with Gauss points along it.
#[derive(Debug, Clone, Copy)]
pub struct EdgeGeometry {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    pub tangent: Point,
    /// Outward normal for a counter-clockwise boundary.
    pub normal: Point,
}

impl EdgeGeometry {
    pub fn new(start: Point, end: Point) -> Result<Self> {
        let d = end - start;
        let length = d.norm();
        if !(length > 1e-300) || !length.is_finite() {
            return Err(FemError::DegenerateGeometry("zero-length edge".into()));
        }
        let tangent = d / length;
        Ok(EdgeGeometry {
            start,
            end,
            length,
            tangent,
            normal: Point::new(tangent.y, -tangent.x),
        })
    }

    pub fn point_at(&self, xi: f64) -> Point {
        self.start + (self.end - self.start) * xi
    }

    /// Gauss points as `(ξ ∈ [0,1], weight · length)`.
    pub fn gauss_points(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        let rule = gauss_rule(n)?;
        Ok(rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w * self.length))
            .collect())
    }
}
