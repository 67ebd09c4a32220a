//! Convergence diagnostics over discrete trajectories and numerical
//! summability verdicts.

pub mod conditions;

use serde::Serialize;

use crate::ext_real::ExtReal;
use crate::integrator::{Flow, Trajectory};
use crate::linalg::Vector;
use crate::operator_core::ConvexSet;

pub use conditions::{
    check_condition, check_integrand, ConditionId, ConditionProblem, ConditionVerdict,
    SummabilityProtocol, Verdict,
};

/// Default fraction of the time span treated as the final window.
pub const FINAL_WINDOW: f64 = 0.1;

/// The trajectory's running averages `X(t_k) = (1/(t_k − t_0))∫x` as a
/// trajectory over the same nodes.
pub fn ergodic_average(traj: &Trajectory) -> Trajectory {
    let mut out = traj.clone();
    out.states = traj.ergodic_states.clone();
    out.metadata.problem = format!("ergodic average of {}", traj.metadata.problem);
    out
}

/// Trapezoid running average of arbitrary samples `(t_k, x_k)`.
pub fn running_average(times: &[f64], states: &[Vector]) -> Vec<Vector> {
    let Some(first) = states.first() else {
        return Vec::new();
    };
    let mut integral = Vector::zeros(first.len());
    let mut out = Vec::with_capacity(states.len());
    out.push(first.clone());
    for k in 1..states.len() {
        let h = times[k] - times[k - 1];
        integral += (&states[k] + &states[k - 1]) * (0.5 * h);
        out.push(&integral / (times[k] - times[0]));
    }
    out
}

pub fn distance_trace(traj: &Trajectory, set: &dyn ConvexSet) -> Vec<f64> {
    traj.states.iter().map(|x| set.distance(x)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyTrace {
    pub values: Vec<ExtReal>,
    /// Per-step increases allowed before a step is flagged.
    pub disc_tol: f64,
    /// Node indices `k` with `φ_{t_k}(x_k) > φ_{t_{k−1}}(x_{k−1}) + disc_tol`.
    pub violations: Vec<usize>,
}

impl EnergyTrace {
    pub fn is_nonincreasing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `φ_{t_k}(x_k)` per node, with monotonicity violations above
/// `10·inner_tol·(1 + max|φ|)` flagged.
pub fn energy_trace(
    traj: &Trajectory,
    family: &dyn Fn(f64, &Vector) -> ExtReal,
    inner_tol: f64,
) -> EnergyTrace {
    let values: Vec<ExtReal> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| family(t, x))
        .collect();
    let scale = values
        .iter()
        .filter_map(|v| v.finite())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let disc_tol = 10.0 * inner_tol * (1.0 + scale);
    let violations = values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] + disc_tol)
        .map(|(k, _)| k + 1)
        .collect();
    EnergyTrace {
        values,
        disc_tol,
        violations,
    }
}

/// [`energy_trace`] for a flow whose summands all have potentials.
pub fn flow_energy_trace(traj: &Trajectory, flow: &Flow) -> Option<EnergyTrace> {
    if !flow.has_energy() {
        return None;
    }
    let family = |t: f64, x: &Vector| flow.energy(t, x).expect("all summands have potentials");
    Some(energy_trace(traj, &family, traj.metadata.inner_tol))
}

/// `‖x(t_k) − ξ(t_k)‖` per node.
pub fn central_path_gap(traj: &Trajectory, xi: &dyn Fn(f64) -> Vector) -> Vec<f64> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| (x - xi(t)).norm())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongMinimumReport {
    pub samples: usize,
    pub violations: usize,
    /// `min_X f(X) − f(ξ) − ‖X − ξ‖²·modulus` over the samples.
    pub worst_margin: f64,
}

/// Checks `f(X) − f(ξ) ≥ modulus·‖X − ξ‖²` on the given points, up to `tol`.
pub fn strong_minimum_check(
    objective: &dyn Fn(&Vector) -> ExtReal,
    center: &Vector,
    modulus: f64,
    points: &[Vector],
    tol: f64,
) -> StrongMinimumReport {
    let base = objective(center);
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for x in points {
        let lhs = objective(x);
        let need = modulus * (x - center).norm_squared();
        let margin = match (lhs, base) {
            (ExtReal::PosInf, _) => f64::INFINITY,
            (ExtReal::Finite(v), ExtReal::Finite(b)) => v - b - need,
            (ExtReal::Finite(_), ExtReal::PosInf) => f64::NEG_INFINITY,
        };
        if margin < -tol {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    StrongMinimumReport {
        samples: points.len(),
        violations,
        worst_margin: worst,
    }
}

/// Index of the first node of the final window `[t_end − fraction·span, t_end]`.
pub fn final_window_start(times: &[f64], fraction: f64) -> usize {
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return 0;
    };
    let cut = t1 - fraction * (t1 - t0);
    times.partition_point(|&t| t < cut).min(times.len().saturating_sub(1))
}

/// `max_k ‖x_k − x̄‖` over the final window, where `x̄` is the window mean.
pub fn oscillation_measure(traj: &Trajectory, fraction: f64) -> f64 {
    let start = final_window_start(&traj.times, fraction);
    let window = &traj.states[start..];
    let mut mean = Vector::zeros(traj.dim());
    for x in window {
        mean += x;
    }
    mean /= window.len() as f64;
    window.iter().map(|x| (x - &mean).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnchorTrace {
    pub anchor: Vec<f64>,
    pub distances: Vec<f64>,
    /// `max − min` of the distance over the final window.
    pub oscillation: f64,
    pub final_distance: f64,
    pub cauchy: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpialReport {
    pub anchors: Vec<AnchorTrace>,
    /// [`oscillation_measure`] of the trajectory itself.
    pub trajectory_oscillation: f64,
    pub all_cauchy: bool,
}

/// Distance traces to each anchor. An anchor is Cauchy when its distance
/// varies by less than `tol·(1 + final distance)` over the final window.
pub fn opial_monitor(traj: &Trajectory, anchors: &[Vector], fraction: f64, tol: f64) -> OpialReport {
    let start = final_window_start(&traj.times, fraction);
    let anchors: Vec<AnchorTrace> = anchors
        .iter()
        .map(|z| {
            let distances: Vec<f64> = traj.states.iter().map(|x| (x - z).norm()).collect();
            let window = &distances[start..];
            let hi = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = window.iter().copied().fold(f64::INFINITY, f64::min);
            let final_distance = *distances.last().unwrap_or(&0.0);
            AnchorTrace {
                anchor: z.iter().copied().collect(),
                oscillation: hi - lo,
                cauchy: hi - lo <= tol * (1.0 + final_distance),
                final_distance,
                distances,
            }
        })
        .collect();
    OpialReport {
        all_cauchy: anchors.iter().all(|a| a.cauchy),
        anchors,
        trajectory_oscillation: oscillation_measure(traj, fraction),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::integrator::{integrate, IntegrateOptions, TimeGrid};
    use crate::linalg::vector;
    use crate::operator_core::functions::QuadraticFunction;
    use crate::operator_core::operators::{LinearOperator, Subdifferential};
    use crate::operator_core::sets::Ball;

    #[test]
    fn running_average_of_circular_motion() {
        for k in [1usize, 4, 16] {
            let t1 = 2.0 * std::f64::consts::PI * k as f64;
            let n = 4000 * k;
            let times: Vec<f64> = (0..=n).map(|i| t1 * i as f64 / n as f64).collect();
            let states: Vec<Vector> = times.iter().map(|&t| vector(&[t.cos(), -t.sin()])).collect();
            let avg = running_average(&times, &states);
            assert!(avg.last().unwrap().norm() < 1e-6);
            let constant = vec![vector(&[2.0]); 5];
            let avg = running_average(&times[..5], &constant);
            assert!(avg.iter().all(|x| (x[0] - 2.0).abs() < 1e-15));
        }
    }

    #[test]
    fn steepest_descent_energy_recursion() {
        let f = Arc::new(QuadraticFunction::half_squared_norm(1));
        let flow = Flow::autonomous(Arc::new(Subdifferential::new(f)));
        let h = 0.1;
        let grid = TimeGrid::uniform(0.0, 5.0, h).unwrap();
        let traj = integrate(&flow, &vector(&[1.0]), &grid, &IntegrateOptions::default()).unwrap();
        let trace = flow_energy_trace(&traj, &flow).unwrap();
        assert!(trace.is_nonincreasing());
        for (k, v) in trace.values.iter().enumerate() {
            let expected = 0.5 * (1.0 + h).powi(-2 * k as i32);
            assert!((v.to_f64() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn opial_monitor_on_rotation() {
        let flow = Flow::autonomous(Arc::new(LinearOperator::rotation2d()));
        let grid = TimeGrid::uniform(0.0, 50.0, 1e-3).unwrap();
        let traj = integrate(&flow, &vector(&[1.0, 0.0]), &grid, &IntegrateOptions::default()).unwrap();
        let report = opial_monitor(&traj, &[vector(&[0.0, 0.0])], FINAL_WINDOW, 1e-2);
        assert!(report.all_cauchy);
        assert!(report.trajectory_oscillation > 0.95);
        let ball = Ball::unit(2);
        assert!(distance_trace(&traj, &ball).iter().all(|&d| d == 0.0));
    }

    #[test]
    fn strong_minimum_of_quadratic() {
        let f = |x: &Vector| ExtReal::Finite(x.norm_squared());
        let pts = vec![vector(&[1.0, 2.0]), vector(&[-3.0, 0.5])];
        let r = strong_minimum_check(&f, &vector(&[0.0, 0.0]), 1.0, &pts, 1e-12);
        assert_eq!(r.violations, 0);
        let r = strong_minimum_check(&f, &vector(&[0.0, 0.0]), 1.5, &pts, 1e-12);
        assert_eq!(r.violations, 2);
    }
}
