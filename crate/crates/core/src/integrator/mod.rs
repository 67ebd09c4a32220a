//! Implicit and proximal discretizations of nonautonomous evolution
//! inclusions `ẋ + A_t x ∋ 0`, the catching-up scheme for moving sets, and
//! the time rescaling `s = ∫ε`.

pub mod flow;
pub mod grid;
pub mod schedules;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ensure_dim, ensure_finite, Vector};
use crate::operator_core::functions::ConvexFunction;
use crate::operator_core::operators::{InnerSolver, DEFAULT_INNER_TOL};
use crate::operator_core::{MonotoneOperator, ResolventReport};

pub use flow::{Flow, FlowTerm, MovingSet, StaticSet, TranslatingSet};
pub use grid::TimeGrid;
pub use schedules::{Schedule, ScheduleRole, VectorPath};

/// Largest `h·L` accepted for an explicit gradient step.
pub const EXPLICIT_STABILITY_BOUND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    Implicit,
    ForwardBackward,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub mode: StepMode,
    /// Record every k-th node (the last node is always recorded).
    pub record_every: usize,
    pub inner: InnerSolver,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            mode: StepMode::Implicit,
            record_every: 1,
            inner: InnerSolver::default(),
        }
    }
}

impl IntegrateOptions {
    pub fn forward_backward() -> Self {
        Self {
            mode: StepMode::ForwardBackward,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_every = stride.max(1);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryMeta {
    pub problem: String,
    pub schedules: Vec<String>,
    pub mode: StepMode,
    pub steps: usize,
    pub record_every: usize,
    pub inner_tol: f64,
}

/// Recorded nodes of a discrete trajectory.
///
/// `step_residuals[k]` is the largest relative inner-solver residual over the
/// steps leading to node `k`; `ergodic_states[k]` is `(1/(t_k − t_0))∫x`
/// accumulated by the trapezoid rule over every step, recorded or not.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    pub step_residuals: Vec<f64>,
    pub ergodic_states: Vec<Vector>,
    /// `Σ h ‖(x₊ − x)/h‖²` over all steps.
    pub kinetic_energy: f64,
    pub metadata: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map(|x| x.len()).unwrap_or(0)
    }

    pub fn final_state(&self) -> &Vector {
        self.states.last().expect("trajectory has at least the initial node")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial node")
    }

    pub fn max_residual(&self) -> f64 {
        self.step_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Discrete strong solution: all inner residuals within `inner_tol`.
    pub fn is_valid(&self) -> bool {
        self.times.windows(2).all(|w| w[1] > w[0])
            && self.states.iter().all(|x| x.iter().all(|v| v.is_finite()))
            && self.max_residual() <= self.metadata.inner_tol
    }
}

struct Recorder {
    stride: usize,
    t0: f64,
    last_t: f64,
    last_x: Vector,
    integral: Vector,
    kinetic: f64,
    pending_residual: f64,
    steps: usize,
    times: Vec<f64>,
    states: Vec<Vector>,
    residuals: Vec<f64>,
    ergodic: Vec<Vector>,
}

impl Recorder {
    fn new(t0: f64, x0: &Vector, stride: usize, capacity: usize) -> Self {
        let cap = capacity / stride.max(1) + 2;
        let mut r = Self {
            stride: stride.max(1),
            t0,
            last_t: t0,
            last_x: x0.clone(),
            integral: Vector::zeros(x0.len()),
            kinetic: 0.0,
            pending_residual: 0.0,
            steps: 0,
            times: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap),
            residuals: Vec::with_capacity(cap),
            ergodic: Vec::with_capacity(cap),
        };
        r.record();
        r
    }

    fn record(&mut self) {
        self.times.push(self.last_t);
        self.states.push(self.last_x.clone());
        self.residuals.push(self.pending_residual);
        let avg = if self.last_t > self.t0 {
            &self.integral / (self.last_t - self.t0)
        } else {
            self.last_x.clone()
        };
        self.ergodic.push(avg);
        self.pending_residual = 0.0;
    }

    fn push(&mut self, t: f64, x: Vector, residual: f64, last: bool) {
        let h = t - self.last_t;
        let dx = &x - &self.last_x;
        self.kinetic += dx.norm_squared() / h;
        self.integral += (&x + &self.last_x) * (0.5 * h);
        self.pending_residual = self.pending_residual.max(residual);
        self.last_t = t;
        self.last_x = x;
        self.steps += 1;
        if last || self.steps.is_multiple_of(self.stride) {
            self.record();
        }
    }

    fn finish(self, metadata: TrajectoryMeta) -> Trajectory {
        Trajectory {
            times: self.times,
            states: self.states,
            step_residuals: self.residuals,
            ergodic_states: self.ergodic,
            kinetic_energy: self.kinetic,
            metadata,
        }
    }
}

fn relative(report: &ResolventReport) -> f64 {
    report.residual / (1.0 + report.point.norm())
}

/// Backward Euler step `x₊ = (I + hA_{t₊})⁻¹ x`.
pub fn step_implicit(a_t: &dyn MonotoneOperator, h: f64, x: &Vector) -> Result<Vector> {
    step_implicit_report(a_t, h, x).map(|r| r.point)
}

pub fn step_implicit_report(a_t: &dyn MonotoneOperator, h: f64, x: &Vector) -> Result<ResolventReport> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step h = {h} must be positive")));
    }
    ensure_dim(x, a_t.dim())?;
    a_t.resolvent_report(h, x)
}

/// Splitting step `x₊ = (I + hβB)⁻¹ (x − h∇Φ(x))`.
pub fn step_forward_backward(
    phi: &dyn ConvexFunction,
    b: &dyn MonotoneOperator,
    beta: f64,
    h: f64,
    x: &Vector,
) -> Result<Vector> {
    step_forward_backward_report(phi, b, beta, h, x).map(|r| r.point)
}

pub fn step_forward_backward_report(
    phi: &dyn ConvexFunction,
    b: &dyn MonotoneOperator,
    beta: f64,
    h: f64,
    x: &Vector,
) -> Result<ResolventReport> {
    if !(h > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "forward-backward step needs h > 0 and beta > 0 (h = {h}, beta = {beta})"
        )));
    }
    ensure_dim(x, phi.dim())?;
    if let Some(l) = phi.gradient_lipschitz() {
        if h * l > EXPLICIT_STABILITY_BOUND {
            return Err(Error::StepTooLarge { step: h });
        }
    }
    let grad = phi
        .gradient(x)
        .ok_or_else(|| Error::NoEvaluator(format!("gradient of {}", phi.name())))?;
    let y = x - grad * h;
    b.resolvent_report(h * beta, &y)
}

/// Runs the flow on the grid from `x0`.
///
/// Weights and forcing are evaluated at the right endpoint of each step. In
/// forward–backward mode the explicit terms are evaluated at the current
/// state and the remaining terms through one resolvent.
pub fn integrate(flow: &Flow, x0: &Vector, grid: &TimeGrid, options: &IntegrateOptions) -> Result<Trajectory> {
    flow.validate()?;
    ensure_dim(x0, flow.dim())?;
    ensure_finite(x0, "initial state")?;
    flow.check_schedules(grid.times())?;
    let times = grid.times();
    let mut recorder = Recorder::new(times[0], x0, options.record_every, grid.steps());
    let mut x = x0.clone();
    for (k, w) in times.windows(2).enumerate() {
        let (t, t_next) = (w[0], w[1]);
        let h = t_next - t;
        let report = match options.mode {
            StepMode::Implicit => flow
                .operator_at_with(t_next, options.inner)
                .and_then(|a| step_implicit_report(a.as_ref(), h, &x)),
            StepMode::ForwardBackward => forward_backward_step(flow, t_next, h, &x, options.inner),
        }
        .map_err(|e| e.at_step(k + 1, t_next))?;
        if report.point.iter().any(|v| !v.is_finite()) {
            return Err(Error::Unbounded { norm: f64::INFINITY }.at_step(k + 1, t_next));
        }
        let residual = relative(&report);
        x = report.point;
        recorder.push(t_next, x.clone(), residual, k + 2 == times.len());
    }
    let meta = TrajectoryMeta {
        problem: flow.name.clone(),
        schedules: flow.schedule_descriptors(),
        mode: options.mode,
        steps: grid.steps(),
        record_every: options.record_every,
        inner_tol: options.inner.tol,
    };
    Ok(recorder.finish(meta))
}

fn forward_backward_step(
    flow: &Flow,
    t_next: f64,
    h: f64,
    x: &Vector,
    solver: InnerSolver,
) -> Result<ResolventReport> {
    let mut y = x.clone();
    let mut stiffness = 0.0;
    for term in flow.terms.iter().filter(|t| t.explicit) {
        let w = term.weight.value(t_next);
        let Some(fx) = term.operator.forward(x) else {
            return Err(Error::NoEvaluator(format!("forward map of {}", term.operator.name())));
        };
        stiffness += w * term.operator.lipschitz().unwrap_or(0.0);
        y -= fx * (h * w);
    }
    if h * stiffness > EXPLICIT_STABILITY_BOUND {
        return Err(Error::StepTooLarge { step: h });
    }
    if let Some(f) = &flow.forcing {
        y += f.value(t_next) * h;
    }
    match flow.implicit_part(t_next, solver)? {
        Some(op) => op.resolvent_report(h, &y),
        None => Ok(ResolventReport::exact(y)),
    }
}

/// Moreau's catching-up scheme `x₊ = proj_{C(t₊)}(x − h∇Φ(x))`.
pub fn catching_up(
    sets: &dyn MovingSet,
    phi: Option<&dyn ConvexFunction>,
    x0: &Vector,
    grid: &TimeGrid,
    record_every: usize,
) -> Result<Trajectory> {
    ensure_dim(x0, sets.dim())?;
    ensure_finite(x0, "initial state")?;
    let times = grid.times();
    let c0 = sets.at(times[0]);
    if !c0.contains(x0) {
        return Err(Error::InfeasibleStart {
            distance: c0.distance(x0),
        });
    }
    if let Some(f) = phi {
        ensure_dim(x0, f.dim())?;
        if let Some(l) = f.gradient_lipschitz() {
            if grid.max_step() * l > EXPLICIT_STABILITY_BOUND {
                return Err(Error::StepTooLarge { step: grid.max_step() });
            }
        }
    }
    let mut recorder = Recorder::new(times[0], x0, record_every, grid.steps());
    let mut x = x0.clone();
    for (k, w) in times.windows(2).enumerate() {
        let (t, t_next) = (w[0], w[1]);
        let h = t_next - t;
        let y = match phi {
            Some(f) => {
                let g = f.gradient(&x).ok_or_else(|| {
                    Error::NoEvaluator(format!("gradient of {}", f.name())).at_step(k + 1, t_next)
                })?;
                &x - g * h
            }
            None => x.clone(),
        };
        x = sets.at(t_next).project(&y);
        recorder.push(t_next, x.clone(), 0.0, k + 2 == times.len());
    }
    let meta = TrajectoryMeta {
        problem: format!("sweeping process on {}", sets.name()),
        schedules: Vec::new(),
        mode: StepMode::ForwardBackward,
        steps: grid.steps(),
        record_every,
        inner_tol: DEFAULT_INNER_TOL,
    };
    Ok(recorder.finish(meta))
}

/// Grid in the rescaled time `s = ∫_0^t ε` and `α = 1/ε` at its nodes.
#[derive(Debug, Clone)]
pub struct Rescaling {
    pub s: TimeGrid,
    pub alpha: Vec<f64>,
}

impl Rescaling {
    /// `α` as a tabulated schedule of `s`.
    pub fn alpha_schedule(&self) -> Schedule {
        Schedule::Tabulated {
            times: self.s.times().to_vec(),
            values: self.alpha.clone(),
        }
    }
}

pub fn time_rescale(epsilon: &Schedule, grid: &TimeGrid) -> Result<Rescaling> {
    let times = grid.times();
    epsilon.check_positive("epsilon", times)?;
    let s: Vec<f64> = if epsilon.antiderivative(times[0]).is_some() {
        times
            .iter()
            .map(|&t| epsilon.antiderivative(t).expect("closed form exists"))
            .collect()
    } else {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(times.len());
        let mut prev = 0.0;
        // ∫_0^{t_0} first, then the trapezoid over the grid.
        if times[0] > 0.0 {
            acc = epsilon.integral(0.0, times[0]);
        }
        for (k, &t) in times.iter().enumerate() {
            if k > 0 {
                acc += 0.5 * (t - prev) * (epsilon.value(t) + epsilon.value(prev));
            }
            out.push(acc);
            prev = t;
        }
        out
    };
    let alpha = times.iter().map(|&t| 1.0 / epsilon.value(t)).collect();
    Ok(Rescaling {
        s: TimeGrid::new(s)?,
        alpha,
    })
}
