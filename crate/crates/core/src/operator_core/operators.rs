//! Maximal monotone operators exposed through resolvent oracles.

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, PosInf};
use crate::linalg::{is_symmetric, Matrix, PsdForm, Vector};
use crate::operator_core::functions::{
    DomainTag, FunctionRef, Indicator, QuadraticFunction, ScaledFunction,
    TiltedFunction,
};
use crate::operator_core::sets::SetRef;

pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_INNER_ITERS: usize = 10_000;

/// Result of a resolvent evaluation.
#[derive(Debug, Clone)]
pub struct ResolventReport {
    pub point: Vector,
    /// Final fixed-point residual of the inner iteration (0 for closed forms).
    pub residual: f64,
    pub iterations: usize,
}

impl ResolventReport {
    pub fn exact(point: Vector) -> Self {
        Self {
            point,
            residual: 0.0,
            iterations: 0,
        }
    }
}

pub type OperatorRef = Arc<dyn MonotoneOperator>;

pub trait MonotoneOperator: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn name(&self) -> String;

    /// `(I + λM)⁻¹ y` with solver diagnostics.
    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport>;

    fn resolvent(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        self.resolvent_report(lambda, y).map(|r| r.point)
    }

    /// Value of a single-valued operator defined on the whole space.
    fn forward(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    fn lipschitz(&self) -> Option<f64> {
        None
    }

    /// Whether the operator is a gradient with Lipschitz constant
    /// [`lipschitz`](Self::lipschitz), hence cocoercive.
    fn cocoercive(&self) -> bool {
        false
    }

    /// `(A, c)` when `M x = A x + c`.
    fn affine_form(&self) -> Option<(Matrix, Vector)> {
        None
    }

    /// Exact Brézis–Haraux function, when a closed form is known.
    fn bh_closed_form(&self, _x: &Vector, _u: &Vector) -> Option<ExtReal> {
        None
    }

    /// `f` with `M = ∂f`, when known.
    fn potential(&self) -> Option<FunctionRef> {
        None
    }

    fn domain(&self) -> DomainTag {
        DomainTag::Whole
    }

    fn has_graph_sampler(&self) -> bool {
        true
    }

    /// Graph points `(y, v)`, `v ∈ My`, from resolvent evaluations at random
    /// points of the ball of radius `radius`.
    fn sample_graph(
        &self,
        count: usize,
        radius: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(Vector, Vector)>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let y = sample_ball(n, radius, rng);
            let w = &y + gaussian(n, rng) * (radius / (n as f64).sqrt());
            let x = self.resolvent(1.0, &w)?;
            let v = w - &x;
            out.push((x, v));
        }
        Ok(out)
    }
}

pub(crate) fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point of the centered ball of the given radius.
pub(crate) fn sample_ball(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vector {
    let mut dir = gaussian(n, rng);
    let norm = dir.norm();
    if norm > 0.0 {
        dir /= norm;
    }
    let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
    dir * r
}

fn check_step(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("resolvent step {lambda} must be positive")))
    }
}

/// Brézis–Haraux function of `x ↦ Ax + c`, with `S` the symmetric part of `A`:
/// `G(x, u) = 2 q_S*((Aᵀx + u − c)/2) − ⟨x, u − c⟩`.
pub(crate) fn bh_affine(a: &Matrix, sym: &PsdForm, c: &Vector, x: &Vector, u: &Vector) -> ExtReal {
    let shifted = u - c;
    let w = (a.tr_mul(x) + &shifted) * 0.5;
    let value = sym.quadratic_conjugate(&w).scale(2.0) - x.dot(&shifted);
    // Clip roundoff below zero; the true value is nonnegative.
    match value {
        ExtReal::Finite(v) if v < 0.0 && v > -1e-9 * (1.0 + x.norm_squared() + u.norm_squared()) => {
            ExtReal::ZERO
        }
        other => other,
    }
}

/// `x ↦ Ax + c` with monotone `A` (positive-semidefinite symmetric part).
#[derive(Debug, Clone)]
pub struct LinearOperator {
    matrix: Matrix,
    offset: Vector,
    sym: PsdForm,
    norm: f64,
}

impl LinearOperator {
    pub fn new(matrix: Matrix, offset: Vector) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: offset.len(),
            });
        }
        let s = (&matrix + matrix.transpose()) * 0.5;
        let sym = PsdForm::new(&s)
            .map_err(|_| Error::InvalidParameter("linear operator is not monotone".into()))?;
        let norm = if matrix.nrows() == 0 {
            0.0
        } else {
            matrix.clone().svd(false, false).singular_values.max()
        };
        Ok(Self {
            matrix,
            offset,
            sym,
            norm,
        })
    }

    pub fn linear(matrix: Matrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Vector::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(Matrix::identity(n, n)).expect("identity is monotone")
    }

    pub fn zero(n: usize) -> Self {
        Self::linear(Matrix::zeros(n, n)).expect("zero is monotone")
    }

    /// The planar rotation `J = [[0, −1], [1, 0]]`.
    pub fn rotation2d() -> Self {
        Self::linear(Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).expect("skew is monotone")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn is_symmetric(&self) -> bool {
        is_symmetric(&self.matrix, 1e-12)
    }
}

impl MonotoneOperator for LinearOperator {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn name(&self) -> String {
        format!("linear({}x{})", self.dim(), self.dim())
    }

    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        check_step(lambda)?;
        let n = self.dim();
        let system = Matrix::identity(n, n) + &self.matrix * lambda;
        let x = system
            .lu()
            .solve(&(y - &self.offset * lambda))
            .ok_or_else(|| Error::InvalidParameter("I + λA is singular".into()))?;
        Ok(ResolventReport::exact(x))
    }

    fn forward(&self, x: &Vector) -> Option<Vector> {
        Some(&self.matrix * x + &self.offset)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.norm)
    }

    fn cocoercive(&self) -> bool {
        self.is_symmetric()
    }

    fn affine_form(&self) -> Option<(Matrix, Vector)> {
        Some((self.matrix.clone(), self.offset.clone()))
    }

    fn bh_closed_form(&self, x: &Vector, u: &Vector) -> Option<ExtReal> {
        Some(bh_affine(&self.matrix, &self.sym, &self.offset, x, u))
    }

    fn potential(&self) -> Option<FunctionRef> {
        if !self.is_symmetric() {
            return None;
        }
        let q = (&self.matrix + self.matrix.transpose()) * 0.5;
        QuadraticFunction::new(q, self.offset.clone(), 0.0)
            .ok()
            .map(|f| Arc::new(f) as FunctionRef)
    }
}

/// `N_C`.
#[derive(Debug, Clone)]
pub struct NormalCone {
    pub set: SetRef,
}

impl NormalCone {
    pub fn new(set: SetRef) -> Self {
        Self { set }
    }
}

impl MonotoneOperator for NormalCone {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn name(&self) -> String {
        format!("normal_cone({})", self.set.name())
    }

    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        check_step(lambda)?;
        Ok(ResolventReport::exact(self.set.project(y)))
    }

    fn bh_closed_form(&self, x: &Vector, u: &Vector) -> Option<ExtReal> {
        let support = self.set.support(u)?;
        if !self.set.contains(x) {
            return Some(PosInf);
        }
        let value = support - x.dot(u);
        Some(match value {
            ExtReal::Finite(v) if v < 0.0 => ExtReal::ZERO,
            other => other,
        })
    }

    fn potential(&self) -> Option<FunctionRef> {
        Some(Arc::new(Indicator::new(self.set.clone())))
    }

    fn domain(&self) -> DomainTag {
        DomainTag::Set(self.set.shape())
    }
}

/// `∂f`.
#[derive(Debug, Clone)]
pub struct Subdifferential {
    pub function: FunctionRef,
    affine: Option<(Matrix, Vector, PsdForm)>,
}

impl Subdifferential {
    pub fn new(function: FunctionRef) -> Self {
        let affine = function.quadratic_form().and_then(|(q, c, _)| {
            let form = PsdForm::new(&q).ok()?;
            Some((q, c, form))
        });
        Self { function, affine }
    }
}

impl MonotoneOperator for Subdifferential {
    fn dim(&self) -> usize {
        self.function.dim()
    }

    fn name(&self) -> String {
        format!("subdifferential({})", self.function.name())
    }

    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        Ok(ResolventReport::exact(self.function.prox(lambda, y)?))
    }

    fn forward(&self, x: &Vector) -> Option<Vector> {
        self.function.gradient_lipschitz()?;
        self.function.gradient(x)
    }

    fn lipschitz(&self) -> Option<f64> {
        self.function.gradient_lipschitz()
    }

    fn cocoercive(&self) -> bool {
        self.function.gradient_lipschitz().is_some()
    }

    fn affine_form(&self) -> Option<(Matrix, Vector)> {
        self.affine.as_ref().map(|(q, c, _)| (q.clone(), c.clone()))
    }

    fn bh_closed_form(&self, x: &Vector, u: &Vector) -> Option<ExtReal> {
        if let Some((q, c, form)) = &self.affine {
            return Some(bh_affine(q, form, c, x, u));
        }
        let set = self.function.indicator_set()?;
        NormalCone::new(set).bh_closed_form(x, u)
    }

    fn potential(&self) -> Option<FunctionRef> {
        Some(self.function.clone())
    }

    fn domain(&self) -> DomainTag {
        self.function.domain()
    }
}

/// `c · M` with `c > 0`.
#[derive(Debug, Clone)]
pub struct ScaledOperator {
    pub inner: OperatorRef,
    pub factor: f64,
}

impl ScaledOperator {
    pub fn new(inner: OperatorRef, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scaling factor {factor}")));
        }
        Ok(Self { inner, factor })
    }
}

impl MonotoneOperator for ScaledOperator {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn name(&self) -> String {
        format!("{}·{}", self.factor, self.inner.name())
    }

    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        check_step(lambda)?;
        self.inner.resolvent_report(self.factor * lambda, y)
    }

    fn forward(&self, x: &Vector) -> Option<Vector> {
        self.inner.forward(x).map(|v| v * self.factor)
    }

    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz().map(|l| l * self.factor)
    }

    fn cocoercive(&self) -> bool {
        self.inner.cocoercive()
    }

    fn affine_form(&self) -> Option<(Matrix, Vector)> {
        self.inner
            .affine_form()
            .map(|(a, c)| (a * self.factor, c * self.factor))
    }

    fn bh_closed_form(&self, x: &Vector, u: &Vector) -> Option<ExtReal> {
        self.inner
            .bh_closed_form(x, &(u / self.factor))
            .map(|g| g.scale(self.factor))
    }

    fn potential(&self) -> Option<FunctionRef> {
        let f = self.inner.potential()?;
        ScaledFunction::new(f, self.factor)
            .ok()
            .map(|g| Arc::new(g) as FunctionRef)
    }

    fn domain(&self) -> DomainTag {
        self.inner.domain()
    }

    fn has_graph_sampler(&self) -> bool {
        self.inner.has_graph_sampler()
    }
}

/// `M + s` for a constant vector `s`.
#[derive(Debug, Clone)]
pub struct ShiftedOperator {
    pub inner: OperatorRef,
    pub shift: Vector,
}

impl ShiftedOperator {
    pub fn new(inner: OperatorRef, shift: Vector) -> Result<Self> {
        if inner.dim() != shift.len() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                got: shift.len(),
            });
        }
        Ok(Self { inner, shift })
    }
}

impl MonotoneOperator for ShiftedOperator {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn name(&self) -> String {
        format!("shifted({})", self.inner.name())
    }

    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        check_step(lambda)?;
        self.inner.resolvent_report(lambda, &(y - &self.shift * lambda))
    }

    fn forward(&self, x: &Vector) -> Option<Vector> {
        self.inner.forward(x).map(|v| v + &self.shift)
    }

    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }

    fn cocoercive(&self) -> bool {
        self.inner.cocoercive()
    }

    fn affine_form(&self) -> Option<(Matrix, Vector)> {
        self.inner.affine_form().map(|(a, c)| (a, c + &self.shift))
    }

    fn bh_closed_form(&self, x: &Vector, u: &Vector) -> Option<ExtReal> {
        self.inner.bh_closed_form(x, &(u - &self.shift))
    }

    fn potential(&self) -> Option<FunctionRef> {
        let f = self.inner.potential()?;
        Some(Arc::new(TiltedFunction::new(f, self.shift.clone(), 0.0)))
    }

    fn domain(&self) -> DomainTag {
        self.inner.domain()
    }

    fn sample_graph(
        &self,
        count: usize,
        radius: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(Vector, Vector)>> {
        Ok(self
            .inner
            .sample_graph(count, radius, rng)?
            .into_iter()
            .map(|(y, v)| (y, v + &self.shift))
            .collect())
    }
}

/// Tolerances of the iterative resolvent solver for sums.
#[derive(Debug, Clone, Copy)]
pub struct InnerSolver {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for InnerSolver {
    fn default() -> Self {
        Self {
            tol: DEFAULT_INNER_TOL,
            max_iters: DEFAULT_MAX_INNER_ITERS,
        }
    }
}

/// `w_a A + w_b B` with positive weights.
///
/// The resolvent is exact when both summands are affine. Otherwise the
/// strongly monotone subproblem `0 ∈ x − y + λ w_a A x + λ w_b B x` is solved
/// by forward–backward iteration when one summand is cocoercive, and by
/// Douglas–Rachford splitting when neither is.
#[derive(Debug, Clone)]
pub struct WeightedSum {
    pub a: OperatorRef,
    pub b: OperatorRef,
    pub weights: (f64, f64),
    pub solver: InnerSolver,
    affine: Option<LinearOperator>,
    maximality_warning: Option<String>,
}

impl WeightedSum {
    pub fn new(a: OperatorRef, b: OperatorRef, weights: (f64, f64)) -> Result<Self> {
        Self::build(a, b, weights, true)
    }

    /// Same as [`new`](Self::new) without logging the maximality warning.
    pub(crate) fn new_quiet(a: OperatorRef, b: OperatorRef, weights: (f64, f64)) -> Result<Self> {
        Self::build(a, b, weights, false)
    }

    fn build(a: OperatorRef, b: OperatorRef, weights: (f64, f64), log_warning: bool) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let (wa, wb) = weights;
        if !(wa > 0.0 && wb > 0.0) || !wa.is_finite() || !wb.is_finite() {
            return Err(Error::InvalidParameter(format!("sum weights ({wa}, {wb}) must be positive")));
        }
        let affine = match (a.affine_form(), b.affine_form()) {
            (Some((ma, ca)), Some((mb, cb))) => {
                Some(LinearOperator::new(ma * wa + mb * wb, ca * wa + cb * wb)?)
            }
            _ => None,
        };
        let maximality_warning = if !a.domain().has_interior() && !b.domain().has_interior() {
            let msg = format!(
                "maximality of {} + {} is not guaranteed: neither domain has interior",
                a.name(),
                b.name()
            );
            if log_warning {
                log::warn!("{msg}");
            }
            Some(msg)
        } else {
            None
        };
        Ok(Self {
            a,
            b,
            weights,
            solver: InnerSolver::default(),
            affine,
            maximality_warning,
        })
    }

    pub fn with_solver(mut self, solver: InnerSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn maximality_warning(&self) -> Option<&str> {
        self.maximality_warning.as_deref()
    }

    fn context(&self) -> String {
        format!("resolvent of {}", self.name())
    }

    /// Forward–backward on `0 ∈ (x − y + λ w_s S x) + λ w_o O x` with `S` cocoercive.
    fn forward_backward(
        &self,
        smooth: &OperatorRef,
        ws: f64,
        other: &OperatorRef,
        wo: f64,
        lambda: f64,
        y: &Vector,
    ) -> Result<ResolventReport> {
        let l = 1.0 + lambda * ws * smooth.lipschitz().unwrap_or(0.0);
        let gamma = 2.0 / (1.0 + l);
        let mut x = other.resolvent(gamma * lambda * wo, y)?;
        let mut residual = f64::INFINITY;
        for k in 1..=self.solver.max_iters {
            let sx = smooth.forward(&x).expect("cocoercive operators have a forward map");
            let grad = &x - y + sx * (lambda * ws);
            let next = other.resolvent(gamma * lambda * wo, &(&x - grad * gamma))?;
            residual = (&next - &x).norm();
            x = next;
            if residual <= self.solver.tol * (1.0 + x.norm()) {
                return Ok(ResolventReport {
                    point: x,
                    residual,
                    iterations: k,
                });
            }
        }
        Err(Error::NonConvergence {
            context: self.context(),
            iterations: self.solver.max_iters,
            residual,
        })
    }

    fn douglas_rachford(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        let (wa, wb) = self.weights;
        let gamma = 1.0;
        let mut z = y.clone();
        let mut residual = f64::INFINITY;
        for k in 1..=self.solver.max_iters {
            let x = self
                .a
                .resolvent(gamma * lambda * wa / (1.0 + gamma), &((&z + y * gamma) / (1.0 + gamma)))?;
            let w = self.b.resolvent(gamma * lambda * wb, &(&x * 2.0 - &z))?;
            let step = &w - &x;
            residual = step.norm();
            z += step;
            if residual <= self.solver.tol * (1.0 + w.norm()) {
                return Ok(ResolventReport {
                    point: w,
                    residual,
                    iterations: k,
                });
            }
        }
        Err(Error::NonConvergence {
            context: self.context(),
            iterations: self.solver.max_iters,
            residual,
        })
    }
}

impl MonotoneOperator for WeightedSum {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn name(&self) -> String {
        format!(
            "{}·{} + {}·{}",
            self.weights.0,
            self.a.name(),
            self.weights.1,
            self.b.name()
        )
    }

    fn resolvent_report(&self, lambda: f64, y: &Vector) -> Result<ResolventReport> {
        check_step(lambda)?;
        if let Some(lin) = &self.affine {
            return lin.resolvent_report(lambda, y);
        }
        let (wa, wb) = self.weights;
        if self.a.cocoercive() && self.a.forward(y).is_some() {
            self.forward_backward(&self.a, wa, &self.b, wb, lambda, y)
        } else if self.b.cocoercive() && self.b.forward(y).is_some() {
            self.forward_backward(&self.b, wb, &self.a, wa, lambda, y)
        } else {
            self.douglas_rachford(lambda, y)
        }
    }

    fn forward(&self, x: &Vector) -> Option<Vector> {
        let (wa, wb) = self.weights;
        Some(self.a.forward(x)? * wa + self.b.forward(x)? * wb)
    }

    fn lipschitz(&self) -> Option<f64> {
        let (wa, wb) = self.weights;
        Some(wa * self.a.lipschitz()? + wb * self.b.lipschitz()?)
    }

    fn cocoercive(&self) -> bool {
        self.a.cocoercive() && self.b.cocoercive()
    }

    fn affine_form(&self) -> Option<(Matrix, Vector)> {
        self.affine.as_ref().and_then(|l| l.affine_form())
    }

    fn bh_closed_form(&self, x: &Vector, u: &Vector) -> Option<ExtReal> {
        self.affine.as_ref().and_then(|l| l.bh_closed_form(x, u))
    }

    fn potential(&self) -> Option<FunctionRef> {
        None
    }

    fn domain(&self) -> DomainTag {
        if self.a.domain() == DomainTag::Whole {
            self.b.domain()
        } else {
            self.a.domain()
        }
    }

    fn sample_graph(
        &self,
        count: usize,
        radius: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(Vector, Vector)>> {
        let (wa, wb) = self.weights;
        let probe = Vector::zeros(self.dim());
        let (single, ws, other, wo) = if self.a.forward(&probe).is_some() {
            (&self.a, wa, &self.b, wb)
        } else if self.b.forward(&probe).is_some() {
            (&self.b, wb, &self.a, wa)
        } else {
            let n = self.dim();
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let y = sample_ball(n, radius, rng);
                let w = &y + gaussian(n, rng) * (radius / (n as f64).sqrt());
                let x = self.resolvent(1.0, &w)?;
                let v = w - &x;
                out.push((x, v));
            }
            return Ok(out);
        };
        Ok(other
            .sample_graph(count, radius, rng)?
            .into_iter()
            .map(|(y, v)| {
                let s = single.forward(&y).expect("checked above");
                let total = s * ws + v * wo;
                (y, total)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use crate::operator_core::sets::Halfspace;

    #[test]
    fn rotation_resolvent_by_hand() {
        let j = LinearOperator::rotation2d();
        let x = j.resolvent(1.0, &vector(&[1.0, 0.0])).unwrap();
        assert!((x - vector(&[0.5, -0.5])).norm() < 1e-15);
    }

    #[test]
    fn halfspace_cone_plus_identity() {
        let c = NormalCone::new(Arc::new(Halfspace::new(vector(&[1.0, 0.0]), 0.0).unwrap()));
        let sum = WeightedSum::new(Arc::new(c), Arc::new(LinearOperator::identity(2)), (1.0, 1.0)).unwrap();
        let x = sum.resolvent(1.0, &vector(&[2.0, 0.0])).unwrap();
        assert!(x.norm() < 1e-10);
        let x = sum.resolvent(1.0, &vector(&[-2.0, 4.0])).unwrap();
        assert!((x - vector(&[-1.0, 2.0])).norm() < 1e-9);
    }

    #[test]
    fn zero_plus_weighted_identity() {
        let sum = WeightedSum::new(
            Arc::new(LinearOperator::zero(1)),
            Arc::new(LinearOperator::identity(1)),
            (1.0, 2.0),
        )
        .unwrap();
        let x = sum.resolvent(1.0, &vector(&[3.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn douglas_rachford_for_two_cones() {
        let h1 = NormalCone::new(Arc::new(Halfspace::new(vector(&[1.0, 0.0]), 0.0).unwrap()));
        let h2 = NormalCone::new(Arc::new(Halfspace::new(vector(&[0.0, 1.0]), 0.0).unwrap()));
        let sum = WeightedSum::new(Arc::new(h1), Arc::new(h2), (1.0, 3.0)).unwrap();
        let x = sum.resolvent(1.0, &vector(&[1.0, 1.0])).unwrap();
        assert!(x.norm() < 1e-9);
    }
}
