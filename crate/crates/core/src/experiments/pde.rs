//! One-dimensional Neumann obstacle problem on `(0, 1)`.
//!
//! States are stored in the weighted coordinates `z = W^{1/2} u`, where `W`
//! holds the trapezoid weights, so that the Euclidean norm of `z` is the
//! discrete `L²` norm of `u` and the gradient flow in `z` is the `L²`
//! gradient flow in `u`.

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{Matrix, Vector};
use crate::operator_core::functions::{ConvexFunction, QuadraticFunction};

/// Uniform grid on `[0, 1]` with `n` nodes, endpoints included.
#[derive(Debug, Clone)]
pub struct NeumannGrid {
    pub nodes: Vec<f64>,
    pub dx: f64,
    /// Trapezoid weights, `dx/2` at the endpoints.
    pub weights: Vector,
}

impl NeumannGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 nodes, got {n}")));
        }
        let dx = 1.0 / (n - 1) as f64;
        let nodes = (0..n).map(|i| i as f64 * dx).collect();
        let weights = Vector::from_fn(n, |i, _| if i == 0 || i == n - 1 { 0.5 * dx } else { dx });
        Ok(Self { nodes, dx, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `K` with `uᵀKu = Σ (u_{i+1} − u_i)²/dx`; row `i` divided by `w_i` is
    /// the second difference with mirrored ghost nodes at the ends.
    pub fn stiffness(&self) -> Matrix {
        let n = self.len();
        let s = 1.0 / self.dx;
        let mut k = Matrix::zeros(n, n);
        for i in 0..n - 1 {
            k[(i, i)] += s;
            k[(i + 1, i + 1)] += s;
            k[(i, i + 1)] -= s;
            k[(i + 1, i)] -= s;
        }
        k
    }

    pub fn integral(&self, u: &Vector) -> f64 {
        self.weights.dot(u)
    }

    pub fn mean(&self, u: &Vector) -> f64 {
        self.integral(u) / self.weights.sum()
    }

    pub fn l2_norm(&self, u: &Vector) -> f64 {
        u.component_mul(u).dot(&self.weights).sqrt()
    }

    /// `uᵀKu + ∫u²`.
    pub fn h1_norm_squared(&self, k: &Matrix, u: &Vector) -> f64 {
        u.dot(&(k * u)) + u.component_mul(u).dot(&self.weights)
    }

    pub fn to_weighted(&self, u: &Vector) -> Vector {
        u.component_mul(&self.weights.map(f64::sqrt))
    }

    pub fn from_weighted(&self, z: &Vector) -> Vector {
        z.component_div(&self.weights.map(f64::sqrt))
    }
}

/// Discretized Neumann problem with data `h` and obstacle levels `a ≤ b`.
#[derive(Debug, Clone)]
pub struct NeumannProblem {
    pub grid: NeumannGrid,
    pub data: Vector,
    pub a: f64,
    pub b: f64,
    pub stiffness: Matrix,
    /// The zero-mean solution of `K û = W h`.
    pub u_hat: Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeumannCase {
    /// `sup û − inf û > b − a`: a unique limit.
    Unique,
    /// `sup û − inf û < b − a`: a segment of limits.
    Segment,
    /// Within the guard band of `b − a`.
    Boundary,
}

impl NeumannCase {
    pub fn label(self) -> &'static str {
        match self {
            NeumannCase::Unique => "case 1",
            NeumannCase::Segment => "case 2",
            NeumannCase::Boundary => "boundary - both analyses attached",
        }
    }
}

pub const CASE_GUARD: f64 = 1e-8;
pub const MEAN_TOL: f64 = 1e-10;

impl NeumannProblem {
    /// Fails with `NonZeroMeanForcing` unless `∫h` vanishes to [`MEAN_TOL`];
    /// with `demean` the mean is subtracted instead.
    pub fn new(grid: NeumannGrid, data: Vector, a: f64, b: f64, demean: bool) -> Result<(Self, Option<f64>)> {
        if data.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: data.len(),
            });
        }
        if a > b {
            return Err(Error::InvalidParameter(format!("obstacle levels need a <= b, got {a} > {b}")));
        }
        let mean = grid.mean(&data);
        let (data, removed) = if mean.abs() > MEAN_TOL {
            if !demean {
                return Err(Error::NonZeroMeanForcing { mean });
            }
            log::warn!("data has mean {mean:.3e}; subtracting it");
            (data.add_scalar(-mean), Some(mean))
        } else {
            (data, None)
        };
        let stiffness = grid.stiffness();
        let w = &grid.weights;
        let system = &stiffness + w * w.transpose();
        let rhs = data.component_mul(w);
        let u_hat = system
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidParameter("singular Neumann system".into()))?;
        let u_hat = u_hat.add_scalar(-grid.mean(&u_hat));
        Ok((
            Self {
                grid,
                data,
                a,
                b,
                stiffness,
                u_hat,
            },
            removed,
        ))
    }

    /// `Ψ(u) = ½uᵀKu − ∫hu`.
    pub fn psi(&self, u: &Vector) -> f64 {
        0.5 * u.dot(&(&self.stiffness * u)) - self.grid.integral(&self.data.component_mul(u))
    }

    /// `Φ(u) = ½∫([u − b]₊² + [a − u]₊²)`.
    pub fn phi(&self, u: &Vector) -> f64 {
        let pen = u.map(|v| 0.5 * ((v - self.b).max(0.0).powi(2) + (self.a - v).max(0.0).powi(2)));
        self.grid.integral(&pen)
    }

    /// `Ψ` in weighted coordinates.
    pub fn psi_weighted(&self) -> Result<QuadraticFunction> {
        let inv_sqrt = self.grid.weights.map(|w| 1.0 / w.sqrt());
        let d = Matrix::from_diagonal(&inv_sqrt);
        let q = &d * &self.stiffness * &d;
        let c = -self.grid.to_weighted(&self.data);
        QuadraticFunction::new(q, c, 0.0)
    }

    /// `Φ` in weighted coordinates.
    pub fn phi_weighted(&self) -> ObstaclePenalty {
        ObstaclePenalty {
            sqrt_weights: self.grid.weights.map(f64::sqrt),
            a: self.a,
            b: self.b,
        }
    }

    pub fn spread(&self) -> f64 {
        self.u_hat.max() - self.u_hat.min()
    }

    pub fn case(&self) -> NeumannCase {
        let gap = self.spread() - (self.b - self.a);
        if gap > CASE_GUARD {
            NeumannCase::Unique
        } else if gap < -CASE_GUARD {
            NeumannCase::Segment
        } else {
            NeumannCase::Boundary
        }
    }

    /// `θ(m) = ∫([û + m − b]₊ − [a − û − m]₊)`, nondecreasing in `m`.
    pub fn theta(&self, m: f64) -> f64 {
        let g = self
            .u_hat
            .map(|v| (v + m - self.b).max(0.0) - (self.a - v - m).max(0.0));
        self.grid.integral(&g)
    }

    /// Root of `θ` by bisection.
    pub fn case1_shift(&self) -> f64 {
        let mut lo = self.a - self.u_hat.max() - 1.0;
        let mut hi = self.b - self.u_hat.min() + 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.theta(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `[a − inf û, b − sup û]`: shifts `m` with `û + m` between the obstacles.
    pub fn segment_shifts(&self) -> (f64, f64) {
        (self.a - self.u_hat.min(), self.b - self.u_hat.max())
    }

    /// `L²` distance from `u` to `{û + m : m ∈ [lo, hi]}` and the closest shift.
    pub fn distance_to_shifts(&self, u: &Vector, lo: f64, hi: f64) -> (f64, f64) {
        let diff = u - &self.u_hat;
        let m = self.grid.mean(&diff).clamp(lo, hi);
        (self.grid.l2_norm(&diff.add_scalar(-m)), m)
    }

    /// `(‖u − ū‖²_{H¹}, 2(Ψ(u) − Ψ(ū)) + ‖u − ū‖²_{L²})`.
    pub fn h1_identity(&self, u: &Vector, u_bar: &Vector) -> (f64, f64) {
        let e = u - u_bar;
        let lhs = self.grid.h1_norm_squared(&self.stiffness, &e);
        let l2 = self.grid.l2_norm(&e);
        let rhs = 2.0 * (self.psi(u) - self.psi(u_bar)) + l2 * l2;
        (lhs, rhs)
    }
}

/// `Σ_i w_i φ(z_i/√w_i)` with `φ(v) = ½([v − b]₊² + [a − v]₊²)`.
#[derive(Debug, Clone)]
pub struct ObstaclePenalty {
    pub sqrt_weights: Vector,
    pub a: f64,
    pub b: f64,
}

impl ObstaclePenalty {
    fn scalar_prox(&self, lambda: f64, v: f64) -> f64 {
        if v > self.b {
            (v + lambda * self.b) / (1.0 + lambda)
        } else if v < self.a {
            (v + lambda * self.a) / (1.0 + lambda)
        } else {
            v
        }
    }

    fn scalar_derivative(&self, v: f64) -> f64 {
        (v - self.b).max(0.0) - (self.a - v).max(0.0)
    }
}

impl ConvexFunction for ObstaclePenalty {
    fn dim(&self) -> usize {
        self.sqrt_weights.len()
    }

    fn name(&self) -> String {
        format!("obstacle penalty [{}, {}]", self.a, self.b)
    }

    fn value(&self, z: &Vector) -> ExtReal {
        let mut total = 0.0;
        for (zi, si) in z.iter().zip(self.sqrt_weights.iter()) {
            let v = zi / si;
            total += si * si * 0.5 * ((v - self.b).max(0.0).powi(2) + (self.a - v).max(0.0).powi(2));
        }
        ExtReal::Finite(total)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("prox step {lambda} must be positive")));
        }
        Ok(Vector::from_fn(self.dim(), |i, _| {
            let s = self.sqrt_weights[i];
            s * self.scalar_prox(lambda, y[i] / s)
        }))
    }

    fn gradient(&self, z: &Vector) -> Option<Vector> {
        Some(Vector::from_fn(self.dim(), |i, _| {
            let s = self.sqrt_weights[i];
            s * self.scalar_derivative(z[i] / s)
        }))
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}
