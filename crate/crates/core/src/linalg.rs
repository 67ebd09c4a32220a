//! Dense vector/matrix helpers shared across the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, PosInf};

/// A point of the finite-dimensional state space.
pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Singular values below this fraction of the largest one count as zero.
pub const PINV_REL_TOL: f64 = 1e-10;

pub fn vector(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}

pub fn zeros(n: usize) -> Vector {
    Vector::zeros(n)
}

pub fn basis_vector(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

pub fn ensure_dim(v: &Vector, n: usize) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        })
    }
}

pub fn ensure_finite(v: &Vector, what: &str) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} has non-finite coordinates")))
    }
}

pub fn is_symmetric(a: &Matrix, tol: f64) -> bool {
    a.is_square() && (a - a.transpose()).amax() <= tol * (1.0 + a.amax())
}

/// Eigen-decomposed symmetric positive-semidefinite matrix with a
/// thresholded pseudo-inverse.
#[derive(Debug, Clone)]
pub struct PsdForm {
    eigenvectors: Matrix,
    eigenvalues: Vector,
    rank_mask: Vec<bool>,
}

impl PsdForm {
    pub fn new(a: &Matrix) -> Result<Self> {
        if !is_symmetric(a, 1e-12) {
            return Err(Error::InvalidParameter("matrix is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(a.clone());
        let max = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if eig.eigenvalues.iter().any(|&v| v < -1e-10 * max.max(1.0)) {
            return Err(Error::InvalidParameter("matrix is not positive semidefinite".into()));
        }
        let cutoff = PINV_REL_TOL * max;
        let rank_mask = eig.eigenvalues.iter().map(|&v| max > 0.0 && v > cutoff).collect();
        Ok(Self {
            eigenvectors: eig.eigenvectors,
            eigenvalues: eig.eigenvalues,
            rank_mask,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn rank(&self) -> usize {
        self.rank_mask.iter().filter(|&&b| b).count()
    }

    /// `½ wᵀ A⁺ w` when `w ∈ range(A)`, `+∞` otherwise: the conjugate of
    /// `x ↦ ½⟨x, Ax⟩`.
    pub fn quadratic_conjugate(&self, w: &Vector) -> ExtReal {
        let coeffs = self.eigenvectors.tr_mul(w);
        let scale = 1.0 + w.norm();
        let mut value = 0.0;
        for (i, &c) in coeffs.iter().enumerate() {
            if self.rank_mask[i] {
                value += 0.5 * c * c / self.eigenvalues[i];
            } else if c.abs() > 1e-9 * scale {
                return PosInf;
            }
        }
        ExtReal::Finite(value)
    }

    pub fn pseudo_inverse(&self) -> Matrix {
        let n = self.dim();
        let mut d = Matrix::zeros(n, n);
        for i in 0..n {
            if self.rank_mask[i] {
                d[(i, i)] = 1.0 / self.eigenvalues[i];
            }
        }
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }
}

/// Orthonormal basis (as matrix columns) of the span of `vectors` in `ℝⁿ`,
/// together with an orthonormal basis of its orthogonal complement.
pub fn span_and_complement(vectors: &[Vector], n: usize, rel_tol: f64) -> (Matrix, Matrix) {
    if vectors.is_empty() {
        return (Matrix::zeros(n, 0), Matrix::identity(n, n));
    }
    let mut gram = Matrix::zeros(n, n);
    for v in vectors {
        gram += v * v.transpose();
    }
    let eig = SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(*v));
    let cutoff = rel_tol.max(1e-14) * max;
    let mut span = Vec::new();
    let mut complement = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let col = eig.eigenvectors.column(i).into_owned();
        if max > 0.0 && lambda > cutoff {
            span.push(col);
        } else {
            complement.push(col);
        }
    }
    (columns_to_matrix(&span, n), columns_to_matrix(&complement, n))
}

fn columns_to_matrix(cols: &[Vector], n: usize) -> Matrix {
    if cols.is_empty() {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_columns(cols)
    }
}

/// Orthogonal projector onto the column span of an orthonormal basis.
pub fn projector(basis: &Matrix) -> Matrix {
    basis * basis.transpose()
}

/// Minimum-norm solution of `A w = p` and whether `p` is in the range of `A`.
pub fn min_norm_solution(a: &Matrix, p: &Vector) -> (Vector, bool) {
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().fold(0.0_f64, |m, v| m.max(*v));
    let eps = PINV_REL_TOL * max;
    let w = svd
        .solve(p, eps.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| Vector::zeros(a.ncols()));
    let residual = (a * &w - p).norm();
    (w, residual <= 1e-9 * (1.0 + p.norm()))
}
