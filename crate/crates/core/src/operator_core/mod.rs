//! Vectors, convex functions, monotone operators and their catalog.

pub mod catalog;
pub mod functions;
pub mod operators;
pub mod sets;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, projector, span_and_complement, Matrix, Vector};

pub use functions::{ConvexFunction, DomainTag, FunctionRef};
pub use operators::{MonotoneOperator, OperatorRef, ResolventReport, WeightedSum};
pub use sets::{ConvexSet, SetRef, SetShape};

/// `(I + λM)⁻¹ y`.
pub fn resolvent(m: &dyn MonotoneOperator, lambda: f64, y: &Vector) -> Result<Vector> {
    ensure_finite(y, "resolvent input")?;
    m.resolvent(lambda, y)
}

/// `argmin f(·) + ‖· − y‖² / (2λ)`.
pub fn prox(f: &dyn ConvexFunction, lambda: f64, y: &Vector) -> Result<Vector> {
    ensure_finite(y, "prox input")?;
    f.prox(lambda, y)
}

pub fn scale_operator(m: OperatorRef, lambda: f64) -> Result<OperatorRef> {
    Ok(Arc::new(operators::ScaledOperator::new(m, lambda)?))
}

pub fn sum_operator(a: OperatorRef, b: OperatorRef, weights: (f64, f64)) -> Result<OperatorRef> {
    Ok(Arc::new(WeightedSum::new(a, b, weights)?))
}

/// Nearest point of a set together with the distance to it.
#[derive(Debug, Clone)]
pub struct Projection {
    pub point: Vector,
    pub distance: f64,
}

pub fn project(s: &dyn ConvexSet, x: &Vector) -> Projection {
    let point = s.project(x);
    let distance = (x - &point).norm();
    Projection { point, distance }
}

/// Orthonormal bases of `F = span(S − S)` and of `F⊥`.
#[derive(Debug, Clone)]
pub struct SubspaceSplit {
    pub f_basis: Matrix,
    pub f_perp_basis: Matrix,
}

impl SubspaceSplit {
    pub fn project_f(&self, v: &Vector) -> Vector {
        &self.f_basis * self.f_basis.tr_mul(v)
    }

    pub fn project_f_perp(&self, v: &Vector) -> Vector {
        &self.f_perp_basis * self.f_perp_basis.tr_mul(v)
    }

    pub fn f_projector(&self) -> Matrix {
        projector(&self.f_basis)
    }

    pub fn f_perp_projector(&self) -> Matrix {
        projector(&self.f_perp_basis)
    }
}

pub fn subspace_split(s: &dyn ConvexSet) -> Result<SubspaceSplit> {
    let directions = s
        .hull_directions()
        .ok_or_else(|| Error::UnsupportedSetShape(s.name()))?;
    let (f_basis, f_perp_basis) = span_and_complement(&directions, s.dim(), 1e-10);
    Ok(SubspaceSplit {
        f_basis,
        f_perp_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use sets::{AffineSubspace, Polytope, ProjectionSet, Segment, Singleton};

    #[test]
    fn split_of_segment() {
        let s = Segment::new(vector(&[-1.0, 0.0]), vector(&[1.0, 0.0])).unwrap();
        let split = subspace_split(&s).unwrap();
        assert_eq!(split.f_basis.ncols(), 1);
        let v = vector(&[2.0, 3.0]);
        assert!((split.project_f(&v) - vector(&[2.0, 0.0])).norm() < 1e-15);
        assert!((split.project_f_perp(&v) - vector(&[0.0, 3.0])).norm() < 1e-15);
    }

    #[test]
    fn split_of_singleton_and_triangle() {
        let split = subspace_split(&Singleton::new(vector(&[1.0, 2.0]))).unwrap();
        assert_eq!(split.f_basis.ncols(), 0);
        assert_eq!(split.f_perp_basis.ncols(), 2);
        let t = Polytope::new(vec![
            vector(&[0.0, 0.0, 0.0]),
            vector(&[1.0, 0.0, 0.0]),
            vector(&[0.0, 1.0, 0.0]),
        ])
        .unwrap();
        let split = subspace_split(&t).unwrap();
        assert_eq!(split.f_basis.ncols(), 2);
        let e3 = vector(&[0.0, 0.0, 1.0]);
        assert!((split.project_f_perp(&e3) - &e3).norm() < 1e-12);
    }

    #[test]
    fn split_rejects_projection_only_sets() {
        let s = ProjectionSet::new(2, "opaque", |x: &Vector| x.clone());
        assert!(matches!(subspace_split(&s), Err(Error::UnsupportedSetShape(_))));
    }

    #[test]
    fn projection_onto_constant_line() {
        let n = 5;
        let base = Vector::from_fn(n, |i, _| i as f64);
        let line = AffineSubspace::new(base.clone(), &[Vector::from_element(n, 1.0)]);
        let x = vector(&[3.0, -1.0, 2.0, 0.5, 7.0]);
        let p = project(&line, &x);
        let dev = &x - &base;
        let expected = &base + Vector::from_element(n, dev.mean());
        assert!((p.point - expected).norm() < 1e-12);
    }
}
