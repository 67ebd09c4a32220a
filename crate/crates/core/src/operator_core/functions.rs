//! Closed convex proper functions exposed through value, prox, conjugate
//! and gradient oracles.

use std::fmt::Debug;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, PosInf};
use crate::linalg::{vector, Matrix, PsdForm, Vector};
use crate::operator_core::sets::{SetRef, SetShape};

/// Coarse description of `dom f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Whole,
    Set(SetShape),
    /// An open set with finitely many boundary points attached, such as the
    /// planar barrier's strip.
    Open,
}

impl DomainTag {
    pub fn has_interior(self) -> bool {
        match self {
            DomainTag::Set(shape) => !shape.is_thin(),
            _ => true,
        }
    }
}

pub type FunctionRef = Arc<dyn ConvexFunction>;

pub trait ConvexFunction: Send + Sync + Debug {
    fn dim(&self) -> usize;

    fn name(&self) -> String;

    fn value(&self, x: &Vector) -> ExtReal;

    /// `argmin f(·) + ‖· − y‖² / (2λ)`.
    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector>;

    fn conjugate(&self, _p: &Vector) -> Result<ExtReal> {
        Err(Error::NoConjugate(self.name()))
    }

    fn has_conjugate(&self) -> bool {
        false
    }

    /// Gradient at points of differentiability.
    fn gradient(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    /// Lipschitz constant of the gradient when `f` is smooth on the whole space.
    fn gradient_lipschitz(&self) -> Option<f64> {
        None
    }

    /// `(Q, c, k)` when `f(x) = ½⟨x, Qx⟩ + ⟨c, x⟩ + k`.
    fn quadratic_form(&self) -> Option<(Matrix, Vector, f64)> {
        None
    }

    /// `C` when `f = δ_C`.
    fn indicator_set(&self) -> Option<SetRef> {
        None
    }

    fn domain(&self) -> DomainTag {
        DomainTag::Whole
    }
}

/// `prox_{λ f*}(v) = v − λ prox_{f/λ}(v/λ)`.
pub fn prox_conjugate(f: &dyn ConvexFunction, lambda: f64, v: &Vector) -> Result<Vector> {
    Ok(v - f.prox(1.0 / lambda, &(v / lambda))? * lambda)
}

fn check_step(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("prox step {lambda} must be positive")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroFunction(pub usize);

impl ConvexFunction for ZeroFunction {
    fn dim(&self) -> usize {
        self.0
    }

    fn name(&self) -> String {
        "zero".into()
    }

    fn value(&self, _x: &Vector) -> ExtReal {
        ExtReal::ZERO
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        Ok(y.clone())
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        Ok(if p.norm() <= 1e-12 { ExtReal::ZERO } else { PosInf })
    }

    fn has_conjugate(&self) -> bool {
        true
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(Vector::zeros(x.len()))
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }

    fn quadratic_form(&self) -> Option<(Matrix, Vector, f64)> {
        Some((Matrix::zeros(self.0, self.0), Vector::zeros(self.0), 0.0))
    }
}

/// `⟨c, x⟩ + k`.
#[derive(Debug, Clone)]
pub struct LinearFunction {
    pub coefficients: Vector,
    pub constant: f64,
}

impl LinearFunction {
    pub fn new(coefficients: Vector, constant: f64) -> Self {
        Self {
            coefficients,
            constant,
        }
    }
}

impl ConvexFunction for LinearFunction {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn name(&self) -> String {
        "linear".into()
    }

    fn value(&self, x: &Vector) -> ExtReal {
        ExtReal::Finite(self.coefficients.dot(x) + self.constant)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        Ok(y - &self.coefficients * lambda)
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        let off = (p - &self.coefficients).norm();
        Ok(if off <= 1e-12 * (1.0 + p.norm()) {
            ExtReal::Finite(-self.constant)
        } else {
            PosInf
        })
    }

    fn has_conjugate(&self) -> bool {
        true
    }

    fn gradient(&self, _x: &Vector) -> Option<Vector> {
        Some(self.coefficients.clone())
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }

    fn quadratic_form(&self) -> Option<(Matrix, Vector, f64)> {
        let n = self.dim();
        Some((Matrix::zeros(n, n), self.coefficients.clone(), self.constant))
    }
}

/// `½⟨x, Qx⟩ + ⟨c, x⟩ + k` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct QuadraticFunction {
    q: Matrix,
    c: Vector,
    k: f64,
    form: PsdForm,
    lipschitz: f64,
    tridiagonal: bool,
}

impl QuadraticFunction {
    pub fn new(q: Matrix, c: Vector, k: f64) -> Result<Self> {
        if q.nrows() != c.len() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                got: c.len(),
            });
        }
        let form = PsdForm::new(&q)?;
        let lipschitz = q.clone().symmetric_eigenvalues().iter().fold(0.0_f64, |m, v| m.max(*v));
        let n = q.nrows();
        let tridiagonal = (0..n).all(|i| (0..n).all(|j| i.abs_diff(j) <= 1 || q[(i, j)] == 0.0));
        Ok(Self {
            q,
            c,
            k,
            form,
            lipschitz,
            tridiagonal,
        })
    }

    /// `½‖x‖²`.
    pub fn half_squared_norm(n: usize) -> Self {
        Self::new(Matrix::identity(n, n), Vector::zeros(n), 0.0).expect("identity is PSD")
    }

    /// `½‖Lx‖²`.
    pub fn from_operator(l: &Matrix) -> Result<Self> {
        let n = l.ncols();
        Self::new(l.transpose() * l, Vector::zeros(n), 0.0)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    pub fn linear_term(&self) -> &Vector {
        &self.c
    }

    /// Solves `(I + λQ) x = rhs`.
    fn shifted_solve(&self, lambda: f64, rhs: &Vector) -> Result<Vector> {
        let n = self.dim();
        if self.tridiagonal && n > 2 {
            return Ok(solve_tridiagonal_shifted(&self.q, lambda, rhs));
        }
        let system = Matrix::identity(n, n) + &self.q * lambda;
        system
            .cholesky()
            .map(|ch| ch.solve(rhs))
            .ok_or_else(|| Error::InvalidParameter("I + λQ is not positive definite".into()))
    }
}

/// Thomas algorithm for `(I + λQ) x = rhs` with tridiagonal `Q`.
fn solve_tridiagonal_shifted(q: &Matrix, lambda: f64, rhs: &Vector) -> Vector {
    let n = rhs.len();
    let diag = |i: usize| 1.0 + lambda * q[(i, i)];
    let lower = |i: usize| lambda * q[(i, i - 1)];
    let upper = |i: usize| lambda * q[(i, i + 1)];
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    c_prime[0] = upper(0) / diag(0);
    d_prime[0] = rhs[0] / diag(0);
    for i in 1..n {
        let denom = diag(i) - lower(i) * c_prime[i - 1];
        if i + 1 < n {
            c_prime[i] = upper(i) / denom;
        }
        d_prime[i] = (rhs[i] - lower(i) * d_prime[i - 1]) / denom;
    }
    let mut x = Vector::zeros(n);
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    x
}

impl ConvexFunction for QuadraticFunction {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn name(&self) -> String {
        "quadratic".into()
    }

    fn value(&self, x: &Vector) -> ExtReal {
        ExtReal::Finite(0.5 * x.dot(&(&self.q * x)) + self.c.dot(x) + self.k)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        self.shifted_solve(lambda, &(y - &self.c * lambda))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        Ok(self.form.quadratic_conjugate(&(p - &self.c)) - self.k)
    }

    fn has_conjugate(&self) -> bool {
        true
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(&self.q * x + &self.c)
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn quadratic_form(&self) -> Option<(Matrix, Vector, f64)> {
        Some((self.q.clone(), self.c.clone(), self.k))
    }
}

/// `δ_C`.
#[derive(Debug, Clone)]
pub struct Indicator {
    pub set: SetRef,
}

impl Indicator {
    pub fn new(set: SetRef) -> Self {
        Self { set }
    }
}

impl ConvexFunction for Indicator {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn name(&self) -> String {
        format!("indicator({})", self.set.name())
    }

    fn value(&self, x: &Vector) -> ExtReal {
        if self.set.contains(x) {
            ExtReal::ZERO
        } else {
            PosInf
        }
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        Ok(self.set.project(y))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        self.set.support(p).ok_or_else(|| Error::NoConjugate(self.name()))
    }

    fn has_conjugate(&self) -> bool {
        self.set.support(&Vector::zeros(self.dim())).is_some()
    }

    fn indicator_set(&self) -> Option<SetRef> {
        Some(self.set.clone())
    }

    fn domain(&self) -> DomainTag {
        DomainTag::Set(self.set.shape())
    }
}

/// `σ_C`.
#[derive(Debug, Clone)]
pub struct SupportFunction {
    pub set: SetRef,
}

impl SupportFunction {
    pub fn new(set: SetRef) -> Result<Self> {
        if set.support(&Vector::zeros(set.dim())).is_none() {
            return Err(Error::UnsupportedSetShape(set.name()));
        }
        Ok(Self { set })
    }
}

impl ConvexFunction for SupportFunction {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn name(&self) -> String {
        format!("support({})", self.set.name())
    }

    fn value(&self, x: &Vector) -> ExtReal {
        self.set.support(x).unwrap_or(PosInf)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        Ok(y - self.set.project(&(y / lambda)) * lambda)
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        Ok(if self.set.contains(p) { ExtReal::ZERO } else { PosInf })
    }

    fn has_conjugate(&self) -> bool {
        true
    }
}

/// `½ d²(·, C)`.
#[derive(Debug, Clone)]
pub struct HalfSquaredDistance {
    pub set: SetRef,
}

impl HalfSquaredDistance {
    pub fn new(set: SetRef) -> Self {
        Self { set }
    }
}

impl ConvexFunction for HalfSquaredDistance {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn name(&self) -> String {
        format!("half_sq_dist({})", self.set.name())
    }

    fn value(&self, x: &Vector) -> ExtReal {
        let d = self.set.distance(x);
        ExtReal::Finite(0.5 * d * d)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        let p = self.set.project(y);
        Ok(y + (p - y) * (lambda / (1.0 + lambda)))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        let s = self.set.support(p).ok_or_else(|| Error::NoConjugate(self.name()))?;
        Ok(s + 0.5 * p.norm_squared())
    }

    fn has_conjugate(&self) -> bool {
        self.set.support(&Vector::zeros(self.dim())).is_some()
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(x - self.set.project(x))
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `a · d^r(·, C)` with `r > 1`, the model of `r`-conditioned growth.
#[derive(Debug, Clone)]
pub struct PowerDistance {
    pub set: SetRef,
    pub a: f64,
    pub r: f64,
}

impl PowerDistance {
    pub fn new(set: SetRef, a: f64, r: f64) -> Result<Self> {
        if !(a > 0.0) || !(r > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power distance needs a > 0 and r > 1, got a = {a}, r = {r}"
            )));
        }
        Ok(Self { set, a, r })
    }
}

impl ConvexFunction for PowerDistance {
    fn dim(&self) -> usize {
        self.set.dim()
    }

    fn name(&self) -> String {
        format!("{}·d^{}({})", self.a, self.r, self.set.name())
    }

    fn value(&self, x: &Vector) -> ExtReal {
        ExtReal::Finite(self.a * self.set.distance(x).powf(self.r))
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        let p = self.set.project(y);
        let d = (y - &p).norm();
        if d == 0.0 {
            return Ok(p);
        }
        // Minimize a s^r + (d − s)²/(2λ) over s ∈ [0, d].
        let deriv = |s: f64| self.a * self.r * s.powf(self.r - 1.0) - (d - s) / lambda;
        let (mut lo, mut hi) = (0.0, d);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if deriv(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-16 * d {
                break;
            }
        }
        let s = 0.5 * (lo + hi);
        Ok(&p + (y - &p) * (s / d))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        let s = self.set.support(p).ok_or_else(|| Error::NoConjugate(self.name()))?;
        Ok(s + theta_conjugate(self.a, self.r, p.norm()))
    }

    fn has_conjugate(&self) -> bool {
        self.set.support(&Vector::zeros(self.dim())).is_some()
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        let p = self.set.project(x);
        let d = (x - &p).norm();
        if d == 0.0 {
            return Some(Vector::zeros(x.len()));
        }
        Some((x - p) * (self.a * self.r * d.powf(self.r - 2.0)))
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        (self.r == 2.0).then_some(2.0 * self.a)
    }
}

/// Conjugate of `θ(t) = a|t|^r`: `((ar)^{1−r*}/r*) |s|^{r*}`, `1/r + 1/r* = 1`.
pub fn theta_conjugate(a: f64, r: f64, s: f64) -> f64 {
    let r_star = 1.0 / (1.0 - 1.0 / r);
    (a * r).powf(1.0 - r_star) / r_star * s.abs().powf(r_star)
}

/// `c · f` with `c > 0`.
#[derive(Debug, Clone)]
pub struct ScaledFunction {
    pub inner: FunctionRef,
    pub factor: f64,
}

impl ScaledFunction {
    pub fn new(inner: FunctionRef, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scaling factor {factor}")));
        }
        Ok(Self { inner, factor })
    }
}

impl ConvexFunction for ScaledFunction {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn name(&self) -> String {
        format!("{}·{}", self.factor, self.inner.name())
    }

    fn value(&self, x: &Vector) -> ExtReal {
        self.inner.value(x).scale(self.factor)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        self.inner.prox(self.factor * lambda, y)
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        Ok(self.inner.conjugate(&(p / self.factor))?.scale(self.factor))
    }

    fn has_conjugate(&self) -> bool {
        self.inner.has_conjugate()
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.inner.gradient(x).map(|g| g * self.factor)
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        self.inner.gradient_lipschitz().map(|l| l * self.factor)
    }

    fn quadratic_form(&self) -> Option<(Matrix, Vector, f64)> {
        self.inner
            .quadratic_form()
            .map(|(q, c, k)| (q * self.factor, c * self.factor, k * self.factor))
    }

    fn indicator_set(&self) -> Option<SetRef> {
        self.inner.indicator_set()
    }

    fn domain(&self) -> DomainTag {
        self.inner.domain()
    }
}

/// `f + ⟨s, ·⟩ + k`.
#[derive(Debug, Clone)]
pub struct TiltedFunction {
    pub inner: FunctionRef,
    pub tilt: Vector,
    pub offset: f64,
}

impl TiltedFunction {
    pub fn new(inner: FunctionRef, tilt: Vector, offset: f64) -> Self {
        Self {
            inner,
            tilt,
            offset,
        }
    }

    /// `f + k`.
    pub fn offset(inner: FunctionRef, offset: f64) -> Self {
        let n = inner.dim();
        Self::new(inner, Vector::zeros(n), offset)
    }
}

impl ConvexFunction for TiltedFunction {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn name(&self) -> String {
        format!("tilted({})", self.inner.name())
    }

    fn value(&self, x: &Vector) -> ExtReal {
        self.inner.value(x) + (self.tilt.dot(x) + self.offset)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        self.inner.prox(lambda, &(y - &self.tilt * lambda))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        Ok(self.inner.conjugate(&(p - &self.tilt))? - self.offset)
    }

    fn has_conjugate(&self) -> bool {
        self.inner.has_conjugate()
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.inner.gradient(x).map(|g| g + &self.tilt)
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        self.inner.gradient_lipschitz()
    }

    fn quadratic_form(&self) -> Option<(Matrix, Vector, f64)> {
        self.inner
            .quadratic_form()
            .map(|(q, c, k)| (q, c + &self.tilt, k + self.offset))
    }

    fn domain(&self) -> DomainTag {
        self.inner.domain()
    }
}

/// Planar barrier `Ψ(x, y) = y² / (2(a² − x²))` on `]−a, a[ × ℝ`, extended by
/// `Ψ(±a, 0) = 0` and `+∞` elsewhere. `argmin Ψ = [−a, a] × {0}`.
#[derive(Debug, Clone, Copy)]
pub struct PlanarBarrier {
    pub a: f64,
}

impl PlanarBarrier {
    /// Prox inputs are clamped this far inside `[−a, a]`.
    pub const EDGE_GUARD: f64 = 1e-12;

    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("barrier width a = {a}")));
        }
        Ok(Self { a })
    }
}

impl ConvexFunction for PlanarBarrier {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> String {
        format!("planar_barrier(a={})", self.a)
    }

    fn value(&self, x: &Vector) -> ExtReal {
        let (u, v) = (x[0], x[1]);
        let slack = self.a * self.a - u * u;
        if u.abs() < self.a && slack > 0.0 {
            ExtReal::Finite(v * v / (2.0 * slack))
        } else if u.abs() == self.a && v == 0.0 {
            ExtReal::ZERO
        } else {
            PosInf
        }
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        let (u, v) = (y[0], y[1]);
        let a2 = self.a * self.a;
        let edge = self.a - Self::EDGE_GUARD;
        // After eliminating the second coordinate, the first solves
        // g'(x) = (x − u) + λ v² x / (a² − x² + λ)² = 0, with g convex on [−a, a].
        let dg = |x: f64| {
            let s = a2 - x * x + lambda;
            (x - u) + lambda * v * v * x / (s * s)
        };
        let x = if dg(-edge) >= 0.0 {
            -edge
        } else if dg(edge) <= 0.0 {
            edge
        } else {
            let (mut lo, mut hi) = (-edge, edge);
            let mut x = u.clamp(lo, hi);
            for _ in 0..200 {
                let g = dg(x);
                if g == 0.0 {
                    break;
                }
                if g > 0.0 {
                    hi = x;
                } else {
                    lo = x;
                }
                let s = a2 - x * x + lambda;
                let d2 = 1.0 + lambda * v * v * (s + 4.0 * x * x) / (s * s * s);
                let newton = x - g / d2;
                if (newton - x).abs() <= f64::EPSILON * (1.0 + x.abs()) {
                    x = newton.clamp(lo, hi);
                    break;
                }
                x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                if hi - lo <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                    break;
                }
            }
            x
        };
        let s = a2 - x * x;
        Ok(vector(&[x, v * s / (s + lambda)]))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        let (pp, q) = (p[0], p[1]);
        let a = self.a;
        let q2 = q * q;
        Ok(ExtReal::Finite(if pp == 0.0 {
            0.5 * q2 * a * a
        } else if pp.abs() <= a * q2 {
            0.5 * q2 * a * a + pp * pp / (2.0 * q2)
        } else {
            a * pp.abs()
        }))
    }

    fn has_conjugate(&self) -> bool {
        true
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        let (u, v) = (x[0], x[1]);
        let s = self.a * self.a - u * u;
        if u.abs() < self.a && s > 0.0 {
            Some(vector(&[u * v * v / (s * s), v / s]))
        } else {
            None
        }
    }

    fn domain(&self) -> DomainTag {
        DomainTag::Open
    }
}

/// Planar objective `Φ(x, y) = y + ½[x − b]₊² + ½[x + b]₋²`;
/// `argmin_{argmin Ψ} Φ = [−b, b] × {0}` with value 0.
#[derive(Debug, Clone, Copy)]
pub struct PlanarObjective {
    pub b: f64,
}

impl PlanarObjective {
    pub fn new(b: f64) -> Result<Self> {
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("objective half-width b = {b}")));
        }
        Ok(Self { b })
    }

    fn excess(&self, x: f64) -> f64 {
        x - x.clamp(-self.b, self.b)
    }
}

impl ConvexFunction for PlanarObjective {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> String {
        format!("planar_objective(b={})", self.b)
    }

    fn value(&self, x: &Vector) -> ExtReal {
        let e = self.excess(x[0]);
        ExtReal::Finite(x[1] + 0.5 * e * e)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        check_step(lambda)?;
        let u = y[0];
        Ok(vector(&[
            u - self.excess(u) * (lambda / (1.0 + lambda)),
            y[1] - lambda,
        ]))
    }

    fn conjugate(&self, p: &Vector) -> Result<ExtReal> {
        Ok(if (p[1] - 1.0).abs() <= 1e-12 {
            ExtReal::Finite(self.b * p[0].abs() + 0.5 * p[0] * p[0])
        } else {
            PosInf
        })
    }

    fn has_conjugate(&self) -> bool {
        true
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        Some(vector(&[self.excess(x[0]), 1.0]))
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_core::sets::{AffineSubspace, Ball, BoxSet};

    /// Brute-force prox by grid search over a square around `y`.
    fn grid_prox_2d(
        f: &dyn ConvexFunction,
        lambda: f64,
        y: &Vector,
        center: &Vector,
        half: f64,
        n: usize,
    ) -> Vector {
        let mut best = (f64::INFINITY, y.clone());
        for i in 0..=n {
            for j in 0..=n {
                let x = vector(&[
                    center[0] - half + 2.0 * half * i as f64 / n as f64,
                    center[1] - half + 2.0 * half * j as f64 / n as f64,
                ]);
                let val = f.value(&x).to_f64() + (&x - y).norm_squared() / (2.0 * lambda);
                if val < best.0 {
                    best = (val, x);
                }
            }
        }
        best.1
    }

    #[test]
    fn prox_of_ball_indicator() {
        let f = Indicator::new(Arc::new(Ball::unit(2)));
        let p = f.prox(2.0, &vector(&[3.0, 4.0])).unwrap();
        assert!((p - vector(&[0.6, 0.8])).norm() < 1e-15);
    }

    #[test]
    fn prox_of_linear_is_shift() {
        let f = LinearFunction::new(vector(&[0.0, 1.0]), 0.0);
        assert_eq!(f.prox(0.5, &vector(&[1.0, 1.0])).unwrap(), vector(&[1.0, 0.5]));
    }

    #[test]
    fn planar_objective_prox_matches_scalar_search() {
        let f = PlanarObjective::new(1.0).unwrap();
        let p = f.prox(1.0, &vector(&[3.0, 0.0])).unwrap();
        assert!((p - vector(&[2.0, -1.0])).norm() < 1e-15);
        // Independent scalar scan of ½[x−1]₊² + ½(x−3)².
        let best_x = (0..=40_000)
            .map(|k| k as f64 * 1e-4)
            .min_by(|a, b| {
                let g = |x: f64| 0.5 * (x - 1.0f64).max(0.0).powi(2) + 0.5 * (x - 3.0).powi(2);
                g(*a).partial_cmp(&g(*b)).unwrap()
            })
            .unwrap();
        assert!((best_x - 2.0).abs() < 1e-4);
    }

    #[test]
    fn planar_barrier_prox_matches_grid() {
        let f = PlanarBarrier::new(2.0).unwrap();
        for (y, lambda) in [
            (vector(&[0.5, 1.0]), 1.0),
            (vector(&[1.9, 0.3]), 0.5),
            (vector(&[-3.0, 2.0]), 2.0),
            (vector(&[0.0, -1.5]), 0.1),
        ] {
            let p = f.prox(lambda, &y).unwrap();
            let coarse = grid_prox_2d(&f, lambda, &y, &y, 3.0, 600);
            let fine = grid_prox_2d(&f, lambda, &y, &coarse, 0.01, 400);
            let obj = |x: &Vector| f.value(x).to_f64() + (x - &y).norm_squared() / (2.0 * lambda);
            assert!(obj(&p) <= obj(&fine) + 1e-9, "{y} {p} {fine}");
            assert!((p - fine).norm() < 1e-3, "{y}");
        }
    }

    #[test]
    fn planar_barrier_conjugate_matches_sup() {
        let f = PlanarBarrier::new(2.0).unwrap();
        for p in [vector(&[0.3, 1.0]), vector(&[5.0, 0.5]), vector(&[-1.0, -2.0])] {
            // sup over x of p₀x + q²(a² − x²)/2 after eliminating y exactly.
            let best = (0..=400_000)
                .map(|k| -2.0 + 1e-5 * k as f64)
                .map(|x| p[0] * x + p[1] * p[1] * (4.0 - x * x) / 2.0)
                .fold(f64::NEG_INFINITY, f64::max);
            let c = f.conjugate(&p).unwrap().to_f64();
            assert!((c - best).abs() < 1e-6, "{p}: {c} vs {best}");
        }
    }

    #[test]
    fn quadratic_prox_and_conjugate() {
        let f = QuadraticFunction::half_squared_norm(1);
        assert!((f.prox(1.0, &vector(&[4.0])).unwrap()[0] - 2.0).abs() < 1e-15);
        assert_eq!(f.conjugate(&vector(&[3.0])).unwrap(), ExtReal::Finite(4.5));
    }

    #[test]
    fn tridiagonal_solver_matches_dense() {
        let n = 6;
        let mut q = Matrix::zeros(n, n);
        for i in 0..n {
            q[(i, i)] = 2.0;
            if i + 1 < n {
                q[(i, i + 1)] = -1.0;
                q[(i + 1, i)] = -1.0;
            }
        }
        let f = QuadraticFunction::new(q.clone(), Vector::zeros(n), 0.0).unwrap();
        let rhs = Vector::from_fn(n, |i, _| (i as f64).sin());
        let fast = f.prox(0.7, &rhs).unwrap();
        let dense = (Matrix::identity(n, n) + q * 0.7).lu().solve(&rhs).unwrap();
        assert!((fast - dense).norm() < 1e-13);
    }

    #[test]
    fn support_prox_is_moreau_complement() {
        let set: SetRef = Arc::new(BoxSet::new(vector(&[-1.0, 0.0]), vector(&[1.0, 2.0])).unwrap());
        let ind = Indicator::new(set.clone());
        let sup = SupportFunction::new(set).unwrap();
        let y = vector(&[3.0, -0.5]);
        let sum = ind.prox(1.0, &y).unwrap() + sup.prox(1.0, &y).unwrap();
        assert!((sum - y).norm() < 1e-15);
    }

    #[test]
    fn power_distance_prox_and_conjugate() {
        let line: SetRef = Arc::new(AffineSubspace::new(vector(&[0.0, 0.0]), &[vector(&[0.0, 1.0])]));
        let f = PowerDistance::new(line.clone(), 0.5, 2.0).unwrap();
        // a d² with a = ½ is ½d²: prox shrinks the distance by 1/(1+λ).
        let p = f.prox(1.0, &vector(&[2.0, 3.0])).unwrap();
        assert!((p - vector(&[1.0, 3.0])).norm() < 1e-12);
        let g = HalfSquaredDistance::new(line);
        let q = vector(&[0.7, 0.0]);
        assert_eq!(f.conjugate(&q).unwrap(), g.conjugate(&q).unwrap());
        assert!((theta_conjugate(1.0, 2.0, 2.0) - 1.0).abs() < 1e-15);
    }
}
