//! The viscosity value map `ω(ε) = inf (Ψ + εΦ)`, computed primally and
//! through the dual problem `|ω(ε)| = min_p Ψ*(εp) + εΦ*(−p)`, together with
//! closed-form bounds on `Ψ*(εp) − σ_C(εp)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::{ExtReal, PosInf};
use crate::linalg::{min_norm_solution, Matrix, Vector};
use crate::operator_core::functions::{prox_conjugate, theta_conjugate};
use crate::operator_core::{ConvexFunction, ConvexSet, DomainTag};

pub const DEFAULT_OMEGA_TOL: f64 = 1e-9;
pub const UNBOUNDED_NORM: f64 = 1e8;

#[derive(Debug, Clone, Copy)]
pub struct OmegaOptions {
    /// Stopping tolerance on the (relative) fixed-point residual.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_OMEGA_TOL,
            max_iters: 500_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaResult {
    pub epsilon: f64,
    pub primal_value: ExtReal,
    pub dual_value: Option<ExtReal>,
    #[serde(skip)]
    pub minimizer: Option<Vector>,
    #[serde(skip)]
    pub dual_multiplier: Option<Vector>,
    /// `|primal + dual|`.
    pub gap: Option<f64>,
    pub iterations: usize,
}

/// `c · f` borrowed, for building `εΦ` without allocation.
struct Scaled<'a> {
    f: &'a dyn ConvexFunction,
    c: f64,
}

impl fmt::Debug for Scaled<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.c, self.f.name())
    }
}

impl ConvexFunction for Scaled<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn name(&self) -> String {
        format!("{self:?}")
    }

    fn value(&self, x: &Vector) -> ExtReal {
        self.f.value(x).scale(self.c)
    }

    fn prox(&self, lambda: f64, y: &Vector) -> Result<Vector> {
        self.f.prox(lambda * self.c, y)
    }

    fn gradient(&self, x: &Vector) -> Option<Vector> {
        self.f.gradient(x).map(|g| g * self.c)
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        self.f.gradient_lipschitz().map(|l| l * self.c)
    }

    fn domain(&self) -> DomainTag {
        self.f.domain()
    }
}

/// `p ↦ f*(s · p)` through the prox of `f` only.
struct ConjugateComposed<'a> {
    f: &'a dyn ConvexFunction,
    /// Argument scaling `s ≠ 0`.
    s: f64,
    /// Outer weight `w > 0`.
    w: f64,
}

impl fmt::Debug for ConjugateComposed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}*({}·)", self.w, self.f.name(), self.s)
    }
}

impl ConvexFunction for ConjugateComposed<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn name(&self) -> String {
        format!("{self:?}")
    }

    fn value(&self, p: &Vector) -> ExtReal {
        self.f
            .conjugate(&(p * self.s))
            .map(|v| v.scale(self.w))
            .unwrap_or(PosInf)
    }

    fn prox(&self, lambda: f64, v: &Vector) -> Result<Vector> {
        // prox of g(s·) at step μ is (1/s) prox_{μ s² g}(s v), with g = f*.
        let mu = lambda * self.w * self.s * self.s;
        Ok(prox_conjugate(self.f, mu, &(v * self.s))? / self.s)
    }
}

enum Smooth {
    First,
    Second,
}

/// Minimizes `f + g`; returns the minimizer, the value and the iteration count.
fn minimize_pair(
    f: &dyn ConvexFunction,
    g: &dyn ConvexFunction,
    start: Vector,
    opts: &OmegaOptions,
    context: &str,
) -> Result<(Vector, ExtReal, usize)> {
    let smooth = if g.gradient_lipschitz().is_some() {
        Some(Smooth::Second)
    } else if f.gradient_lipschitz().is_some() {
        Some(Smooth::First)
    } else {
        None
    };
    match smooth {
        Some(Smooth::Second) => proximal_gradient(f, g, start, opts, context),
        Some(Smooth::First) => proximal_gradient(g, f, start, opts, context),
        None => douglas_rachford(f, g, start, opts, context),
    }
}

fn check_bounded(x: &Vector) -> Result<()> {
    let n = x.norm();
    if n > UNBOUNDED_NORM || !n.is_finite() {
        Err(Error::Unbounded { norm: n })
    } else {
        Ok(())
    }
}

/// Accelerated proximal gradient with backtracking and adaptive restart on
/// `f + g`, `g` smooth.
fn proximal_gradient(
    f: &dyn ConvexFunction,
    g: &dyn ConvexFunction,
    start: Vector,
    opts: &OmegaOptions,
    context: &str,
) -> Result<(Vector, ExtReal, usize)> {
    let lipschitz = g.gradient_lipschitz().unwrap_or(1.0);
    let mut gamma = if lipschitz > 0.0 { 1.0 / lipschitz } else { 1.0 };
    let objective = |x: &Vector| f.value(x) + g.value(x);
    let mut x = f.prox(gamma, &start)?;
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut fx = objective(&x);
    let mut residual = f64::INFINITY;
    let mut restarted = false;
    for k in 1..=opts.max_iters {
        let grad = g.gradient(&y).ok_or_else(|| Error::NoEvaluator(g.name()))?;
        let gy = g.value(&y).to_f64();
        let next = loop {
            let cand = f.prox(gamma, &(&y - &grad * gamma))?;
            let d = &cand - &y;
            let model = gy + grad.dot(&d) + d.norm_squared() / (2.0 * gamma);
            let actual = g.value(&cand).to_f64();
            if actual <= model + 1e-12 * (1.0 + model.abs()) {
                break cand;
            }
            gamma *= 0.5;
            if gamma < 1e-14 {
                return Err(Error::StepTooLarge { step: gamma });
            }
        };
        check_bounded(&next)?;
        residual = (&next - &y).norm() / gamma;
        let f_next = objective(&next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // Restart momentum on an increase. An increase right after a restart
        // comes from a plain proximal-gradient step, hence from rounding.
        if f_next > fx && !restarted {
            t = 1.0;
            y = x.clone();
            restarted = true;
            if residual <= opts.tol * (1.0 + x.norm()) {
                return Ok((x, fx, k));
            }
            continue;
        }
        restarted = false;
        y = &next + (&next - &x) * ((t - 1.0) / t_next);
        t = t_next;
        let moved = (&next - &x).norm();
        x = next;
        fx = f_next;
        if residual <= opts.tol * (1.0 + x.norm()) && moved <= opts.tol * (1.0 + x.norm()) * gamma.max(1.0) {
            return Ok((x, fx, k));
        }
    }
    Err(Error::NonConvergence {
        context: context.to_string(),
        iterations: opts.max_iters,
        residual,
    })
}

/// Douglas–Rachford splitting on `f + g`.
fn douglas_rachford(
    f: &dyn ConvexFunction,
    g: &dyn ConvexFunction,
    start: Vector,
    opts: &OmegaOptions,
    context: &str,
) -> Result<(Vector, ExtReal, usize)> {
    let gamma = 1.0;
    let mut z = start;
    let mut residual = f64::INFINITY;
    for k in 1..=opts.max_iters {
        let x = f.prox(gamma, &z)?;
        let w = g.prox(gamma, &(&x * 2.0 - &z))?;
        let step = &w - &x;
        residual = step.norm();
        z += step;
        check_bounded(&z)?;
        if residual <= opts.tol * (1.0 + x.norm()) {
            let vx = f.value(&x) + g.value(&x);
            let vw = f.value(&w) + g.value(&w);
            let (point, value) = if vw <= vx { (w, vw) } else { (x, vx) };
            return Ok((point, value, k));
        }
    }
    Err(Error::NonConvergence {
        context: context.to_string(),
        iterations: opts.max_iters,
        residual,
    })
}

fn proximal_point(
    f: &dyn ConvexFunction,
    start: Vector,
    opts: &OmegaOptions,
    context: &str,
) -> Result<(Vector, ExtReal, usize)> {
    let mut x = start;
    let mut residual = f64::INFINITY;
    for k in 1..=opts.max_iters {
        let next = f.prox(1.0, &x)?;
        check_bounded(&next)?;
        residual = (&next - &x).norm();
        x = next;
        if residual <= opts.tol * (1.0 + x.norm()) {
            let v = f.value(&x);
            return Ok((x, v, k));
        }
    }
    Err(Error::NonConvergence {
        context: context.to_string(),
        iterations: opts.max_iters,
        residual,
    })
}

/// `ω(ε) = min Ψ + εΦ` by proximal splitting, started from `start`
/// (the origin when `None`).
pub fn omega_primal(
    psi: &dyn ConvexFunction,
    phi: &dyn ConvexFunction,
    epsilon: f64,
    start: Option<&Vector>,
    opts: &OmegaOptions,
) -> Result<OmegaResult> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon}")));
    }
    let x0 = start.cloned().unwrap_or_else(|| Vector::zeros(psi.dim()));
    let context = format!("omega_primal(eps = {epsilon})");
    let (x, value, iterations) = if epsilon == 0.0 {
        proximal_point(psi, x0, opts, &context)?
    } else {
        let scaled = Scaled { f: phi, c: epsilon };
        minimize_pair(psi, &scaled, x0, opts, &context)?
    };
    Ok(OmegaResult {
        epsilon,
        primal_value: value,
        dual_value: None,
        minimizer: Some(x),
        dual_multiplier: None,
        gap: None,
        iterations,
    })
}

/// `min_p Ψ*(εp) + εΦ*(−p)`, with the primal value and gap filled in.
pub fn omega_dual(
    psi: &dyn ConvexFunction,
    phi: &dyn ConvexFunction,
    epsilon: f64,
    start: Option<&Vector>,
    opts: &OmegaOptions,
) -> Result<OmegaResult> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("dual needs epsilon > 0, got {epsilon}")));
    }
    for f in [psi, phi] {
        if !f.has_conjugate() {
            return Err(Error::NoConjugate(f.name()));
        }
    }
    let n = psi.dim();
    let h1 = ConjugateComposed {
        f: psi,
        s: epsilon,
        w: 1.0,
    };
    let h2 = ConjugateComposed {
        f: phi,
        s: -1.0,
        w: epsilon,
    };
    let context = format!("omega_dual(eps = {epsilon})");
    let (p, dual, _) = douglas_rachford(&h1, &h2, Vector::zeros(n), opts, &context)?;
    let primal = omega_primal(psi, phi, epsilon, start, opts)?;
    let gap = match (primal.primal_value, dual) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => Some((a + b).abs()),
        _ => None,
    };
    Ok(OmegaResult {
        dual_value: Some(dual),
        dual_multiplier: Some(p),
        gap,
        ..primal
    })
}

/// `θ*(ε‖p‖)` for `θ(t) = a|t|^r`: bounds `Ψ*(εp) − σ_C(εp)` when
/// `Ψ ≥ a·d^r(·, C)`.
pub fn theta_conjugate_bound(a: f64, r: f64, epsilon: f64, p_norm: f64) -> Result<f64> {
    if !(a > 0.0) || !(r > 1.0) {
        return Err(Error::InvalidParameter(format!("theta bound needs a > 0, r > 1 (a = {a}, r = {r})")));
    }
    Ok(theta_conjugate(a, r, epsilon * p_norm))
}

/// `(ε²/2)·min{‖w‖² : Lᵀw = p}`, `+∞` when `p ∉ range(Lᵀ)`: bounds
/// `Ψ*(εp) − σ_C(εp)` for `Ψ = ½‖L·‖²`.
pub fn quadratic_operator_bound(l: &Matrix, epsilon: f64, p: &Vector) -> ExtReal {
    let (w, in_range) = min_norm_solution(&l.transpose(), p);
    if in_range {
        ExtReal::Finite(0.5 * epsilon * epsilon * w.norm_squared())
    } else {
        PosInf
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HausdorffBound {
    /// `d(εp, K) − d(εp, T_K(0))`.
    pub value: f64,
    /// Sampled estimate of `haus_ρ(K, T_K(0))` at `ρ = ε‖p‖`, when requested.
    pub haus_rho: Option<f64>,
}

/// For `Ψ* = d(·, K)` with `0 ∈ K`, `σ_C = d(·, T_K(0))` and the bound is
/// evaluated exactly. A positive `rho_budget` also estimates the truncated
/// Hausdorff distance `sup_{‖x‖ ≤ ρ} d(x, K) − d(x, T_K(0))` by sampling.
pub fn hausdorff_bound(
    k: &dyn ConvexSet,
    epsilon: f64,
    p: &Vector,
    rho_budget: usize,
) -> Result<HausdorffBound> {
    let origin = Vector::zeros(k.dim());
    if !k.contains(&origin) {
        return Err(Error::InvalidParameter("hausdorff bound needs 0 ∈ K".into()));
    }
    let cone = k
        .tangent_cone_at(&origin)
        .ok_or_else(|| Error::UnsupportedSetShape(k.name()))?;
    let q = p * epsilon;
    let value = (k.distance(&q) - cone.distance(&q)).max(0.0);
    let haus_rho = (rho_budget > 0).then(|| {
        let rho = q.norm();
        let mut rng = ChaCha8Rng::seed_from_u64(crate::fitzpatrick::DEFAULT_SEED);
        let n = k.dim();
        (0..rho_budget)
            .map(|_| {
                let x = Vector::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
                let norm = x.norm().max(1e-300);
                let x = x * (rho * rng.random::<f64>().powf(1.0 / n as f64) / norm);
                k.distance(&x) - cone.distance(&x)
            })
            .fold(0.0_f64, f64::max)
    });
    Ok(HausdorffBound { value, haus_rho })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub epsilons: Vec<f64>,
    pub omegas: Vec<f64>,
    /// `ω(ε)/ε` per grid point.
    pub slopes: Vec<f64>,
    /// `|ω(ε)/ε|` is nonincreasing along the (decreasing) grid.
    pub monotone_decrease: bool,
}

/// `ω(ε)/ε` along a decreasing grid; grid points are evaluated in parallel.
pub fn asymptotic_slope(
    psi: &dyn ConvexFunction,
    phi: &dyn ConvexFunction,
    eps_grid: &[f64],
    opts: &OmegaOptions,
) -> Result<SlopeReport> {
    if eps_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter("epsilon grid must be positive".into()));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("epsilon grid must be decreasing".into()));
    }
    let omegas: Vec<f64> = eps_grid
        .par_iter()
        .map(|&e| omega_primal(psi, phi, e, None, opts).map(|r| r.primal_value.to_f64()))
        .collect::<Result<_>>()?;
    let slopes: Vec<f64> = omegas.iter().zip(eps_grid).map(|(w, e)| w / e).collect();
    let monotone_decrease = slopes
        .windows(2)
        .all(|w| w[1].abs() <= w[0].abs() * (1.0 + 1e-9) + 1e-12);
    Ok(SlopeReport {
        epsilons: eps_grid.to_vec(),
        omegas,
        slopes,
        monotone_decrease,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationReport {
    pub psi_inf: f64,
    pub phi_inf_on_c: f64,
    /// Constants to subtract from `Ψ` and `Φ` to restore `inf Ψ = 0`,
    /// `inf_C Φ = 0` (zero within tolerance when already normalized).
    pub psi_offset: f64,
    pub phi_offset: f64,
    pub normalized: bool,
}

/// Numerically checks `inf Ψ = 0` and `inf_C Φ = 0`.
pub fn check_normalization(
    psi: &dyn ConvexFunction,
    phi: &dyn ConvexFunction,
    c: &dyn ConvexSet,
    tol: f64,
) -> Result<NormalizationReport> {
    let opts = OmegaOptions::default();
    let n = psi.dim();
    let start = c.project(&Vector::zeros(n));
    let (_, psi_min, _) = proximal_point(psi, start.clone(), &opts, "inf psi")?;
    let mut psi_inf = psi_min.to_f64();
    // Ψ is constant on C; an exact sample at the projection guards against
    // slow proximal-point convergence.
    psi_inf = psi_inf.min(psi.value(&start).to_f64());
    let indicator = IndicatorOf(c);
    let (_, phi_min, _) = minimize_pair(&indicator, phi, start, &opts, "inf_C phi")?;
    let phi_inf_on_c = phi_min.to_f64();
    let psi_offset = if psi_inf.abs() > tol { psi_inf } else { 0.0 };
    let phi_offset = if phi_inf_on_c.abs() > tol { phi_inf_on_c } else { 0.0 };
    Ok(NormalizationReport {
        psi_inf,
        phi_inf_on_c,
        psi_offset,
        phi_offset,
        normalized: psi_offset == 0.0 && phi_offset == 0.0,
    })
}

/// `δ_C` for a borrowed set.
struct IndicatorOf<'a>(&'a dyn ConvexSet);

impl fmt::Debug for IndicatorOf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "indicator({})", self.0.name())
    }
}

impl ConvexFunction for IndicatorOf<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn name(&self) -> String {
        format!("{self:?}")
    }

    fn value(&self, x: &Vector) -> ExtReal {
        if self.0.contains(x) {
            ExtReal::ZERO
        } else {
            PosInf
        }
    }

    fn prox(&self, _lambda: f64, y: &Vector) -> Result<Vector> {
        Ok(self.0.project(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use crate::operator_core::functions::{
        LinearFunction, PlanarBarrier, PlanarObjective, QuadraticFunction, TiltedFunction,
    };
    use crate::operator_core::sets::{Ball, BoxSet, ParabolicRegion};
    use std::sync::Arc;

    fn hyperplane_pair() -> (QuadraticFunction, LinearFunction) {
        let q = Matrix::from_diagonal(&vector(&[1.0, 0.0]));
        (
            QuadraticFunction::new(q, Vector::zeros(2), 0.0).unwrap(),
            LinearFunction::new(vector(&[1.0, 0.0]), 0.0),
        )
    }

    #[test]
    fn planar_example_closed_form() {
        let psi = PlanarBarrier::new(2.0).unwrap();
        let phi = PlanarObjective::new(1.0).unwrap();
        let opts = OmegaOptions::default();
        let r0 = omega_primal(&psi, &phi, 0.0, None, &opts).unwrap();
        assert_eq!(r0.primal_value, ExtReal::ZERO);
        for eps in [1e-1, 1e-2, 1e-3] {
            let r = omega_dual(&psi, &phi, eps, None, &opts).unwrap();
            let exact = -4.0 * eps * eps / 2.0;
            assert!((r.primal_value.to_f64() - exact).abs() < 1e-8, "{eps}: {:?}", r.primal_value);
            assert!((r.dual_value.unwrap().to_f64() + exact).abs() < 1e-6, "{eps}: {:?}", r.dual_value);
        }
        let r = omega_primal(&psi, &phi, 0.1, None, &opts).unwrap();
        let x = r.minimizer.unwrap();
        assert!((x - vector(&[0.0, -0.4])).norm() < 1e-6);
    }

    #[test]
    fn hyperplane_distance_with_linear_objective() {
        let (psi, phi) = hyperplane_pair();
        let opts = OmegaOptions::default();
        let r = omega_dual(&psi, &phi, 0.3, None, &opts).unwrap();
        assert!((r.primal_value.to_f64() + 0.045).abs() < 1e-10);
        assert!((r.dual_value.unwrap().to_f64() - 0.045).abs() < 1e-8);
        let slopes = asymptotic_slope(&psi, &phi, &[1.0, 0.1, 0.01], &opts).unwrap();
        for (s, e) in slopes.slopes.iter().zip(&slopes.epsilons) {
            assert!((s + e / 2.0).abs() < 1e-9);
        }
        assert!(slopes.monotone_decrease);
    }

    #[test]
    fn zero_objective_gives_zero_dual() {
        let psi = QuadraticFunction::half_squared_norm(2);
        let phi = LinearFunction::new(Vector::zeros(2), 0.0);
        let r = omega_dual(&psi, &phi, 0.5, None, &OmegaOptions::default()).unwrap();
        assert!(r.dual_value.unwrap().to_f64().abs() < 1e-12);
        assert!(r.primal_value.to_f64().abs() < 1e-12);
    }

    #[test]
    fn conditioning_bounds() {
        assert!((theta_conjugate_bound(1.0, 2.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(theta_conjugate_bound(1.0, 2.0, 0.0, 3.0).unwrap(), 0.0);
        // a = ½, r = 2: θ*(s) = s²/2, the quadratic-conditioning rate c ε².
        let b = theta_conjugate_bound(0.5, 2.0, 0.1, 3.0).unwrap();
        assert!((b - 0.5 * 0.09).abs() < 1e-15);
        assert!(theta_conjugate_bound(1.0, 1.0, 1.0, 1.0).is_err());

        let id = Matrix::identity(2, 2);
        assert_eq!(quadratic_operator_bound(&id, 1.0, &vector(&[0.0, 0.0])), ExtReal::ZERO);
        let v = quadratic_operator_bound(&id, 1.0, &vector(&[2.0, 0.0])).to_f64();
        assert!((v - 2.0).abs() < 1e-12);
        let row = Matrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let v = quadratic_operator_bound(&row, 1.0, &vector(&[3.0, 0.0])).to_f64();
        assert!((v - 4.5).abs() < 1e-12);
        assert_eq!(quadratic_operator_bound(&row, 1.0, &vector(&[3.0, 1.0])), PosInf);
    }

    #[test]
    fn hausdorff_examples() {
        let cone = BoxSet::new(
            vector(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            vector(&[0.0, f64::INFINITY]),
        )
        .unwrap();
        let b = hausdorff_bound(&cone, 0.7, &vector(&[1.0, -2.0]), 100).unwrap();
        assert_eq!(b.value, 0.0);
        assert_eq!(b.haus_rho, Some(0.0));
        let shifted = Ball::new(vector(&[-1.0, 0.0]), 1.0).unwrap();
        let b = hausdorff_bound(&shifted, 1.0, &vector(&[1.0, 0.0]), 0).unwrap();
        assert!(b.value.abs() < 1e-15);
        let b = hausdorff_bound(&ParabolicRegion, 1.0, &vector(&[1.0, 0.0]), 0).unwrap();
        assert!(b.value.abs() < 1e-12);
        // Off the symmetry axis the gap is positive.
        let b = hausdorff_bound(&shifted, 1.0, &vector(&[0.0, 2.0]), 0).unwrap();
        assert!((b.value - (5.0_f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn normalization_report() {
        let psi = PlanarBarrier::new(2.0).unwrap();
        let phi = PlanarObjective::new(1.0).unwrap();
        let c = BoxSet::new(vector(&[-2.0, 0.0]), vector(&[2.0, 0.0])).unwrap();
        let r = check_normalization(&psi, &phi, &c, 1e-8).unwrap();
        assert!(r.normalized, "{r:?}");
        let shifted = TiltedFunction::offset(Arc::new(psi), 5.0);
        let r = check_normalization(&shifted, &phi, &c, 1e-8).unwrap();
        assert!((r.psi_offset - 5.0).abs() < 1e-12);
        assert_eq!(r.phi_offset, 0.0);
    }
}
