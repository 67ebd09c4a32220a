//! Closed convex sets exposed through projection oracles.

use std::fmt::Debug;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, PosInf};
use crate::linalg::{span_and_complement, Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetShape {
    Ball,
    Box,
    Halfspace,
    Affine,
    Segment,
    Polyhedron,
    Polytope,
    Singleton,
    Whole,
    Parabolic,
    Translated,
    Projection,
}

impl SetShape {
    /// Whether sets of this shape can have an empty interior in their
    /// ambient space regardless of parameters.
    pub fn is_thin(self) -> bool {
        matches!(self, SetShape::Affine | SetShape::Segment | SetShape::Singleton)
    }
}

pub type SetRef = Arc<dyn ConvexSet>;

pub trait ConvexSet: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Nearest point of the set.
    fn project(&self, x: &Vector) -> Vector;

    fn shape(&self) -> SetShape;

    fn name(&self) -> String;

    fn membership_tolerance(&self) -> f64 {
        1e-10
    }

    /// Support function `σ_C(u) = sup_{c ∈ C} ⟨c, u⟩`, when available.
    fn support(&self, _u: &Vector) -> Option<ExtReal> {
        None
    }

    /// Vectors spanning the direction space of the affine hull.
    fn hull_directions(&self) -> Option<Vec<Vector>> {
        None
    }

    /// Tangent cone at a point of the set, as a set of directions.
    fn tangent_cone_at(&self, _x: &Vector) -> Option<SetRef> {
        None
    }

    fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }

    fn contains(&self, x: &Vector) -> bool {
        self.distance(x) <= self.membership_tolerance() * (1.0 + x.norm())
    }
}

fn parallel_coefficient(u: &Vector, a: &Vector) -> Option<f64> {
    let t = u.dot(a) / a.norm_squared();
    let residual = (u - a * t).norm();
    if residual <= 1e-9 * (1.0 + u.norm()) {
        Some(t)
    } else {
        None
    }
}

fn coordinate_directions(n: usize) -> Vec<Vector> {
    (0..n).map(|i| crate::linalg::basis_vector(n, i)).collect()
}

#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            center: Vector::zeros(n),
            radius: 1.0,
        }
    }
}

impl ConvexSet for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn project(&self, x: &Vector) -> Vector {
        let d = x - &self.center;
        let n = d.norm();
        if n <= self.radius {
            x.clone()
        } else {
            &self.center + d * (self.radius / n)
        }
    }

    fn shape(&self) -> SetShape {
        SetShape::Ball
    }

    fn name(&self) -> String {
        format!("ball(r={})", self.radius)
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        Some(ExtReal::Finite(self.center.dot(u) + self.radius * u.norm()))
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        if self.radius > 0.0 {
            Some(coordinate_directions(self.dim()))
        } else {
            Some(Vec::new())
        }
    }

    fn tangent_cone_at(&self, x: &Vector) -> Option<SetRef> {
        let d = x - &self.center;
        if d.norm() < self.radius * (1.0 - 1e-12) {
            Some(Arc::new(WholeSpace(self.dim())))
        } else if self.radius == 0.0 {
            Some(Arc::new(Singleton::new(Vector::zeros(self.dim()))))
        } else {
            Some(Arc::new(Halfspace::new(d, 0.0).ok()?))
        }
    }
}

/// Axis-aligned box; bounds may be infinite.
#[derive(Debug, Clone)]
pub struct BoxSet {
    pub lower: Vector,
    pub upper: Vector,
}

impl BoxSet {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u || l.is_nan() || u.is_nan()) {
            return Err(Error::InvalidParameter("box with lower > upper".into()));
        }
        Ok(Self { lower, upper })
    }
}

impl ConvexSet for BoxSet {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn project(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            x.len(),
            x.iter()
                .enumerate()
                .map(|(i, &v)| v.clamp(self.lower[i], self.upper[i])),
        )
    }

    fn shape(&self) -> SetShape {
        SetShape::Box
    }

    fn name(&self) -> String {
        "box".into()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        let mut total = 0.0;
        for (i, &ui) in u.iter().enumerate() {
            let bound = if ui > 0.0 {
                self.upper[i]
            } else if ui < 0.0 {
                self.lower[i]
            } else {
                continue;
            };
            if !bound.is_finite() {
                return Some(PosInf);
            }
            total += bound * ui;
        }
        Some(ExtReal::Finite(total))
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        let n = self.dim();
        Some(
            (0..n)
                .filter(|&i| self.upper[i] > self.lower[i])
                .map(|i| crate::linalg::basis_vector(n, i))
                .collect(),
        )
    }

    fn tangent_cone_at(&self, x: &Vector) -> Option<SetRef> {
        let n = self.dim();
        let mut lo = Vector::from_element(n, f64::NEG_INFINITY);
        let mut hi = Vector::from_element(n, f64::INFINITY);
        for i in 0..n {
            let tol = 1e-12 * (1.0 + x[i].abs());
            if (x[i] - self.lower[i]).abs() <= tol {
                lo[i] = 0.0;
            }
            if (x[i] - self.upper[i]).abs() <= tol {
                hi[i] = 0.0;
            }
        }
        Some(Arc::new(BoxSet { lower: lo, upper: hi }))
    }
}

/// `{x : ⟨normal, x⟩ ≤ offset}`.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::InvalidParameter("halfspace with zero normal".into()));
        }
        Ok(Self { normal, offset })
    }
}

impl ConvexSet for Halfspace {
    fn dim(&self) -> usize {
        self.normal.len()
    }

    fn project(&self, x: &Vector) -> Vector {
        let excess = self.normal.dot(x) - self.offset;
        if excess <= 0.0 {
            x.clone()
        } else {
            x - &self.normal * (excess / self.normal.norm_squared())
        }
    }

    fn shape(&self) -> SetShape {
        SetShape::Halfspace
    }

    fn name(&self) -> String {
        "halfspace".into()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        match parallel_coefficient(u, &self.normal) {
            Some(t) if t >= -1e-12 => Some(ExtReal::Finite(t.max(0.0) * self.offset)),
            _ => Some(PosInf),
        }
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        Some(coordinate_directions(self.dim()))
    }

    fn tangent_cone_at(&self, x: &Vector) -> Option<SetRef> {
        if self.normal.dot(x) < self.offset - 1e-12 * (1.0 + self.offset.abs()) {
            Some(Arc::new(WholeSpace(self.dim())))
        } else {
            Some(Arc::new(Halfspace {
                normal: self.normal.clone(),
                offset: 0.0,
            }))
        }
    }
}

/// Affine subspace `point + span(directions)`.
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    pub point: Vector,
    basis: Matrix,
}

impl AffineSubspace {
    pub fn new(point: Vector, directions: &[Vector]) -> Self {
        let n = point.len();
        let (basis, _) = span_and_complement(directions, n, 1e-12);
        Self { point, basis }
    }

    /// Orthonormal basis of the direction space, as columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
}

impl ConvexSet for AffineSubspace {
    fn dim(&self) -> usize {
        self.point.len()
    }

    fn project(&self, x: &Vector) -> Vector {
        let d = x - &self.point;
        &self.point + &self.basis * self.basis.tr_mul(&d)
    }

    fn shape(&self) -> SetShape {
        SetShape::Affine
    }

    fn name(&self) -> String {
        format!("affine(dim {})", self.basis.ncols())
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        let along = self.basis.tr_mul(u);
        if along.norm() <= 1e-9 * (1.0 + u.norm()) {
            Some(ExtReal::Finite(self.point.dot(u)))
        } else {
            Some(PosInf)
        }
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        Some(self.basis.column_iter().map(|c| c.into_owned()).collect())
    }

    fn tangent_cone_at(&self, _x: &Vector) -> Option<SetRef> {
        Some(Arc::new(AffineSubspace {
            point: Vector::zeros(self.dim()),
            basis: self.basis.clone(),
        }))
    }
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub start: Vector,
    pub end: Vector,
}

impl Segment {
    pub fn new(start: Vector, end: Vector) -> Result<Self> {
        if start.len() != end.len() {
            return Err(Error::DimensionMismatch {
                expected: start.len(),
                got: end.len(),
            });
        }
        Ok(Self { start, end })
    }
}

impl ConvexSet for Segment {
    fn dim(&self) -> usize {
        self.start.len()
    }

    fn project(&self, x: &Vector) -> Vector {
        let d = &self.end - &self.start;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return self.start.clone();
        }
        let t = ((x - &self.start).dot(&d) / len2).clamp(0.0, 1.0);
        &self.start + d * t
    }

    fn shape(&self) -> SetShape {
        SetShape::Segment
    }

    fn name(&self) -> String {
        "segment".into()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        Some(ExtReal::Finite(self.start.dot(u).max(self.end.dot(u))))
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        let d = &self.end - &self.start;
        Some(if d.norm() > 0.0 { vec![d] } else { Vec::new() })
    }
}

#[derive(Debug, Clone)]
pub struct Singleton {
    pub point: Vector,
}

impl Singleton {
    pub fn new(point: Vector) -> Self {
        Self { point }
    }
}

impl ConvexSet for Singleton {
    fn dim(&self) -> usize {
        self.point.len()
    }

    fn project(&self, _x: &Vector) -> Vector {
        self.point.clone()
    }

    fn shape(&self) -> SetShape {
        SetShape::Singleton
    }

    fn name(&self) -> String {
        "singleton".into()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        Some(ExtReal::Finite(self.point.dot(u)))
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        Some(Vec::new())
    }

    fn tangent_cone_at(&self, _x: &Vector) -> Option<SetRef> {
        Some(Arc::new(Singleton::new(Vector::zeros(self.dim()))))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WholeSpace(pub usize);

impl ConvexSet for WholeSpace {
    fn dim(&self) -> usize {
        self.0
    }

    fn project(&self, x: &Vector) -> Vector {
        x.clone()
    }

    fn shape(&self) -> SetShape {
        SetShape::Whole
    }

    fn name(&self) -> String {
        "whole_space".into()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        Some(if u.norm() <= 1e-12 {
            ExtReal::ZERO
        } else {
            PosInf
        })
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        Some(coordinate_directions(self.0))
    }

    fn tangent_cone_at(&self, _x: &Vector) -> Option<SetRef> {
        Some(Arc::new(*self))
    }
}

/// Intersection of halfspaces, projected by Dykstra's alternating scheme.
/// An optional vertex list (for bounded polyhedra) enables the support
/// function and the affine-hull computation.
#[derive(Debug, Clone)]
pub struct Polyhedron {
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Option<Vec<Vector>>,
    dim: usize,
}

impl Polyhedron {
    pub fn new(halfspaces: Vec<Halfspace>, vertices: Option<Vec<Vector>>) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(|h| h.dim())
            .ok_or_else(|| Error::InvalidParameter("polyhedron without constraints".into()))?;
        if halfspaces.iter().any(|h| h.dim() != dim) {
            return Err(Error::InvalidParameter("polyhedron constraints of mixed dimension".into()));
        }
        Ok(Self {
            halfspaces,
            vertices,
            dim,
        })
    }
}

impl ConvexSet for Polyhedron {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, x: &Vector) -> Vector {
        if self.halfspaces.iter().all(|h| h.normal.dot(x) <= h.offset) {
            return x.clone();
        }
        let m = self.halfspaces.len();
        let mut p = x.clone();
        let mut increments = vec![Vector::zeros(self.dim); m];
        for _ in 0..100_000 {
            let before = p.clone();
            for (h, inc) in self.halfspaces.iter().zip(increments.iter_mut()) {
                let shifted = &p + &*inc;
                let next = h.project(&shifted);
                *inc = shifted - &next;
                p = next;
            }
            if (&p - &before).norm() <= 1e-15 * (1.0 + p.norm()) {
                break;
            }
        }
        p
    }

    fn shape(&self) -> SetShape {
        SetShape::Polyhedron
    }

    fn name(&self) -> String {
        format!("polyhedron({} constraints)", self.halfspaces.len())
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        self.vertices.as_ref().map(|vs| {
            ExtReal::Finite(vs.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max))
        })
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        let vs = self.vertices.as_ref()?;
        let first = vs.first()?;
        Some(vs.iter().skip(1).map(|v| v - first).collect())
    }

    fn tangent_cone_at(&self, x: &Vector) -> Option<SetRef> {
        let active: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .filter(|h| h.normal.dot(x) >= h.offset - 1e-12 * (1.0 + h.offset.abs()))
            .map(|h| Halfspace {
                normal: h.normal.clone(),
                offset: 0.0,
            })
            .collect();
        if active.is_empty() {
            Some(Arc::new(WholeSpace(self.dim)))
        } else {
            Some(Arc::new(Polyhedron::new(active, None).ok()?))
        }
    }
}

/// Convex hull of finitely many points.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub vertices: Vec<Vector>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let n = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidParameter("polytope without vertices".into()))?;
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidParameter("polytope vertices of mixed dimension".into()));
        }
        Ok(Self { vertices })
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(w: &[f64]) -> Vec<f64> {
    let mut sorted = w.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - 1.0) / (k as f64 + 1.0);
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    w.iter().map(|&v| (v - theta).max(0.0)).collect()
}

impl ConvexSet for Polytope {
    fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    fn project(&self, x: &Vector) -> Vector {
        // Accelerated projected gradient on barycentric weights.
        let m = self.vertices.len();
        let v = Matrix::from_columns(&self.vertices);
        let lipschitz = (v.transpose() * &v).norm().max(1e-300);
        let mut w = vec![1.0 / m as f64; m];
        let mut z = w.clone();
        let mut t = 1.0_f64;
        let mut point = &v * Vector::from_column_slice(&w);
        for _ in 0..200_000 {
            let zp = &v * Vector::from_column_slice(&z);
            let grad = v.tr_mul(&(zp - x));
            let step: Vec<f64> = z.iter().zip(grad.iter()).map(|(a, g)| a - g / lipschitz).collect();
            let w_next = project_simplex(&step);
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let momentum = (t - 1.0) / t_next;
            z = w_next
                .iter()
                .zip(w.iter())
                .map(|(a, b)| a + momentum * (a - b))
                .collect();
            let next_point = &v * Vector::from_column_slice(&w_next);
            let moved = (&next_point - &point).norm();
            w = w_next;
            t = t_next;
            point = next_point;
            if moved <= 1e-15 * (1.0 + point.norm()) {
                break;
            }
        }
        point
    }

    fn shape(&self) -> SetShape {
        SetShape::Polytope
    }

    fn name(&self) -> String {
        format!("polytope({} vertices)", self.vertices.len())
    }

    fn membership_tolerance(&self) -> f64 {
        1e-8
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        Some(ExtReal::Finite(
            self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max),
        ))
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        let first = &self.vertices[0];
        Some(self.vertices.iter().skip(1).map(|v| v - first).collect())
    }
}

/// The planar region `{(x, y) : 2x + y² ≤ 0}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParabolicRegion;

impl ParabolicRegion {
    fn squared_distance_to_boundary_point(u: f64, v: f64, y: f64) -> f64 {
        let x = -0.5 * y * y;
        (x - u).powi(2) + (y - v).powi(2)
    }
}

/// Real roots of `y³ + p y + q = 0`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    } else if p == 0.0 {
        vec![0.0]
    } else {
        let r = (-p / 3.0).sqrt();
        let phi = ((-q / 2.0) / r.powi(3)).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|k| 2.0 * r * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos())
            .collect()
    }
}

impl ConvexSet for ParabolicRegion {
    fn dim(&self) -> usize {
        2
    }

    fn project(&self, x: &Vector) -> Vector {
        let (u, v) = (x[0], x[1]);
        if 2.0 * u + v * v <= 0.0 {
            return x.clone();
        }
        // Stationarity of the distance along (−y²/2, y): y³ + 2(1+u)y − 2v = 0.
        let mut best = f64::NAN;
        let mut best_d = f64::INFINITY;
        for mut y in depressed_cubic_roots(2.0 * (1.0 + u), -2.0 * v) {
            for _ in 0..3 {
                let f = y * y * y + 2.0 * (1.0 + u) * y - 2.0 * v;
                let df = 3.0 * y * y + 2.0 * (1.0 + u);
                if df.abs() > 1e-300 {
                    y -= f / df;
                }
            }
            let d = Self::squared_distance_to_boundary_point(u, v, y);
            if d < best_d {
                best_d = d;
                best = y;
            }
        }
        crate::linalg::vector(&[-0.5 * best * best, best])
    }

    fn shape(&self) -> SetShape {
        SetShape::Parabolic
    }

    fn name(&self) -> String {
        "parabolic_region".into()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        let (p, q) = (u[0], u[1]);
        Some(if p > 0.0 {
            ExtReal::Finite(q * q / (2.0 * p))
        } else if p == 0.0 && q == 0.0 {
            ExtReal::ZERO
        } else {
            PosInf
        })
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        Some(coordinate_directions(2))
    }

    fn tangent_cone_at(&self, x: &Vector) -> Option<SetRef> {
        let (u, v) = (x[0], x[1]);
        if 2.0 * u + v * v < -1e-12 {
            Some(Arc::new(WholeSpace(2)))
        } else {
            // Gradient of 2x + y² is (2, 2y).
            Some(Arc::new(Halfspace::new(crate::linalg::vector(&[2.0, 2.0 * v]), 0.0).ok()?))
        }
    }
}

/// `offset + inner`.
#[derive(Debug, Clone)]
pub struct Translated {
    pub inner: SetRef,
    pub offset: Vector,
}

impl Translated {
    pub fn new(inner: SetRef, offset: Vector) -> Self {
        Self { inner, offset }
    }
}

impl ConvexSet for Translated {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn project(&self, x: &Vector) -> Vector {
        &self.offset + self.inner.project(&(x - &self.offset))
    }

    fn shape(&self) -> SetShape {
        SetShape::Translated
    }

    fn name(&self) -> String {
        format!("translated({})", self.inner.name())
    }

    fn membership_tolerance(&self) -> f64 {
        self.inner.membership_tolerance()
    }

    fn support(&self, u: &Vector) -> Option<ExtReal> {
        self.inner.support(u).map(|s| s + self.offset.dot(u))
    }

    fn hull_directions(&self) -> Option<Vec<Vector>> {
        self.inner.hull_directions()
    }

    fn tangent_cone_at(&self, x: &Vector) -> Option<SetRef> {
        self.inner.tangent_cone_at(&(x - &self.offset))
    }
}

/// A set known only through a projection closure.
pub struct ProjectionSet {
    dim: usize,
    label: String,
    projector: Box<dyn Fn(&Vector) -> Vector + Send + Sync>,
}

impl ProjectionSet {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        projector: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            label: label.into(),
            projector: Box::new(projector),
        }
    }
}

impl Debug for ProjectionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProjectionSet").field("label", &self.label).finish()
    }
}

impl ConvexSet for ProjectionSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, x: &Vector) -> Vector {
        (self.projector)(x)
    }

    fn shape(&self) -> SetShape {
        SetShape::Projection
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn segment_projection() {
        let s = Segment::new(vector(&[-1.0, 0.0]), vector(&[1.0, 0.0])).unwrap();
        assert_eq!(s.project(&vector(&[2.0, 3.0])), vector(&[1.0, 0.0]));
    }

    #[test]
    fn orthant_projection_by_dykstra() {
        let p = Polyhedron::new(
            vec![
                Halfspace::new(vector(&[1.0, 0.0]), 0.0).unwrap(),
                Halfspace::new(vector(&[0.0, 1.0]), 0.0).unwrap(),
            ],
            None,
        )
        .unwrap();
        let proj = p.project(&vector(&[1.0, 1.0]));
        assert!(proj.norm() < 1e-12);
        let proj = p.project(&vector(&[1.0, -2.0]));
        assert!((&proj - vector(&[0.0, -2.0])).norm() < 1e-12);
    }

    #[test]
    fn dykstra_handles_non_orthogonal_constraints() {
        // {x + y ≤ 1, x − y ≤ 0}: from (3, 0) the nearest point is (0.5, 0.5).
        let p = Polyhedron::new(
            vec![
                Halfspace::new(vector(&[1.0, 1.0]), 1.0).unwrap(),
                Halfspace::new(vector(&[1.0, -1.0]), 0.0).unwrap(),
            ],
            None,
        )
        .unwrap();
        let proj = p.project(&vector(&[3.0, 0.0]));
        assert!((&proj - vector(&[0.5, 0.5])).norm() < 1e-9, "{proj}");
    }

    #[test]
    fn polytope_projection_onto_triangle() {
        let t = Polytope::new(vec![
            vector(&[0.0, 0.0]),
            vector(&[1.0, 0.0]),
            vector(&[0.0, 1.0]),
        ])
        .unwrap();
        let proj = t.project(&vector(&[1.0, 1.0]));
        assert!((&proj - vector(&[0.5, 0.5])).norm() < 1e-8, "{proj}");
        let proj = t.project(&vector(&[-1.0, 0.25]));
        assert!((&proj - vector(&[0.0, 0.25])).norm() < 1e-8, "{proj}");
    }

    #[test]
    fn parabolic_projection_is_on_boundary_and_optimal() {
        let d = ParabolicRegion;
        assert_eq!(d.project(&vector(&[1.0, 0.0])), vector(&[0.0, 0.0]));
        for &(u, v) in &[(0.3, 1.7), (-2.0, 3.0), (-1.5, 1.8), (4.0, -0.5)] {
            let x = vector(&[u, v]);
            let p = d.project(&x);
            assert!((2.0 * p[0] + p[1] * p[1]).abs() < 1e-10);
            // Compare against a dense scan of the boundary.
            let best = (0..200_001)
                .map(|k| -10.0 + 1e-4 * k as f64)
                .map(|y| ParabolicRegion::squared_distance_to_boundary_point(u, v, y))
                .fold(f64::INFINITY, f64::min);
            assert!((x - &p).norm_squared() <= best + 1e-7);
        }
    }

    #[test]
    fn support_functions() {
        let b = Ball::unit(2);
        assert_eq!(b.support(&vector(&[3.0, 4.0])), Some(ExtReal::Finite(5.0)));
        let h = Halfspace::new(vector(&[1.0, 0.0]), 2.0).unwrap();
        assert_eq!(h.support(&vector(&[3.0, 0.0])), Some(ExtReal::Finite(6.0)));
        assert_eq!(h.support(&vector(&[3.0, 1.0])), Some(PosInf));
        assert_eq!(h.support(&vector(&[-1.0, 0.0])), Some(PosInf));
        let bx = BoxSet::new(vector(&[0.0, f64::NEG_INFINITY]), vector(&[1.0, 0.0])).unwrap();
        assert_eq!(bx.support(&vector(&[1.0, 2.0])), Some(ExtReal::Finite(1.0)));
        assert_eq!(bx.support(&vector(&[1.0, -2.0])), Some(PosInf));
    }

    #[test]
    fn tangent_cone_of_shifted_ball_at_origin() {
        let k = Ball::new(vector(&[-1.0, 0.0]), 1.0).unwrap();
        let t = k.tangent_cone_at(&vector(&[0.0, 0.0])).unwrap();
        assert_eq!(t.shape(), SetShape::Halfspace);
        assert_eq!(t.project(&vector(&[1.0, 2.0])), vector(&[0.0, 2.0]));
    }

    #[test]
    fn translated_set() {
        let t = Translated::new(Arc::new(Ball::unit(2)), vector(&[5.0, 0.0]));
        assert_eq!(t.project(&vector(&[0.0, 0.0])), vector(&[4.0, 0.0]));
        assert_eq!(t.support(&vector(&[1.0, 0.0])), Some(ExtReal::Finite(6.0)));
    }
}
