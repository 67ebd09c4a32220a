use std::sync::Arc;

use monoflow::diagnostics::flow_energy_trace;
use monoflow::integrator::{
    catching_up, integrate, step_forward_backward, time_rescale, Flow, IntegrateOptions, Schedule, StaticSet,
    TimeGrid, TranslatingSet, VectorPath,
};
use monoflow::operator_core::catalog::{self, Params};
use monoflow::operator_core::functions::{PlanarBarrier, PlanarObjective};
use monoflow::operator_core::operators::{LinearOperator, Subdifferential};
use monoflow::operator_core::sets::{Ball, Halfspace};
use monoflow::operator_core::ConvexFunction;
use monoflow::{vector, Error, Vector};
use proptest::prelude::*;

/// Minimizes `hβΨ(z) + ½‖z − y‖²` by nested grid refinement.
fn grid_search_prox(psi: &dyn ConvexFunction, weight: f64, y: &Vector) -> Vector {
    let objective = |x: f64, z: f64| {
        let p = vector(&[x, z]);
        psi.value(&p).to_f64() * weight + 0.5 * (&p - y).norm_squared()
    };
    let (mut cx, mut cy, mut half) = (y[0].clamp(-1.99, 1.99), 0.0, 2.0);
    for _ in 0..12 {
        let mut best = (f64::INFINITY, cx, cy);
        for i in -50..=50 {
            for j in -50..=50 {
                let (x, z) = (cx + half * i as f64 / 50.0, cy + half * j as f64 / 50.0);
                let v = objective(x, z);
                if v < best.0 {
                    best = (v, x, z);
                }
            }
        }
        (cx, cy) = (best.1, best.2);
        half /= 5.0;
    }
    vector(&[cx, cy])
}

#[test]
fn forward_backward_step_matches_grid_search() {
    let psi = PlanarBarrier::new(2.0).unwrap();
    let phi = PlanarObjective::new(1.0).unwrap();
    let b = Subdifferential::new(Arc::new(PlanarBarrier::new(2.0).unwrap()));
    let (h, beta) = (0.01, 100.0);
    let x = vector(&[1.5, 0.5]);
    let step = step_forward_backward(&phi, &b, beta, h, &x).unwrap();
    let y = &x - phi.gradient(&x).unwrap() * h;
    let oracle = grid_search_prox(&psi, h * beta, &y);
    assert!((&step - &oracle).norm() < 1e-3, "{step} vs {oracle}");
}

#[test]
fn explicit_step_beyond_stability_bound_is_rejected() {
    let phi = PlanarObjective::new(1.0).unwrap();
    let b = Subdifferential::new(Arc::new(PlanarBarrier::new(2.0).unwrap()));
    let err = step_forward_backward(&phi, &b, 1.0, 2.5, &vector(&[1.5, 0.5])).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }), "{err}");
}

#[test]
fn implicit_energy_dissipation_bound() {
    let f = catalog::function("shifted_quadratic", 2, &Params::new()).unwrap();
    let flow = Flow::autonomous(Arc::new(Subdifferential::new(f.clone())));
    let x0 = vector(&[4.0, -3.0]);
    let grid = TimeGrid::uniform(0.0, 20.0, 0.05).unwrap();
    let traj = integrate(&flow, &x0, &grid, &IntegrateOptions::default()).unwrap();
    let drop = f.value(&x0).to_f64();
    assert!(traj.kinetic_energy <= drop + 1e-12, "{} > {drop}", traj.kinetic_energy);
    assert!(flow_energy_trace(&traj, &flow).unwrap().is_nonincreasing());
    assert!(traj.is_valid());
}

#[test]
fn recording_stride_keeps_last_node() {
    let flow = Flow::autonomous(Arc::new(LinearOperator::identity(2)));
    let grid = TimeGrid::uniform(0.0, 1.0, 0.01).unwrap();
    let opts = IntegrateOptions::default().with_stride(7);
    let traj = integrate(&flow, &vector(&[1.0, 1.0]), &grid, &opts).unwrap();
    assert_eq!(traj.len(), 100 / 7 + 2);
    assert!((traj.final_time() - 1.0).abs() < 1e-12);
    // Backward Euler for x' = −x.
    let exact = (1.0_f64 / 1.01).powi(100);
    assert!((traj.final_state()[0] - exact).abs() < 1e-12);
}

#[test]
fn rescaled_tikhonov_flow_tracks_original() {
    // x' + ∇Φ(x) + ε(t)x = 0 in time s = ∫ε reads x_s + α(s)∇Φ(x) + x = 0.
    let phi = catalog::function("shifted_quadratic", 2, &Params::new()).unwrap();
    let psi = catalog::function("half_squared_norm", 2, &Params::new()).unwrap();
    let eps = Schedule::power(1.0, -0.5);
    let x0 = vector(&[0.0, 5.0]);
    let grid = TimeGrid::uniform(0.0, 50.0, 0.005).unwrap();
    let original = Flow::new("tikhonov")
        .with_term(Arc::new(Subdifferential::new(phi.clone())), Schedule::constant(1.0), "one")
        .with_term(Arc::new(Subdifferential::new(psi.clone())), eps.clone(), "epsilon");
    let a = integrate(&original, &x0, &grid, &IntegrateOptions::default()).unwrap();

    let r = time_rescale(&eps, &grid).unwrap();
    let s0 = r.s.start();
    let shifted = TimeGrid::new(r.s.times().iter().map(|s| s - s0).collect()).unwrap();
    assert!((shifted.end() - 2.0 * (51.0_f64.sqrt() - 1.0)).abs() < 1e-9);
    let alpha = Schedule::Tabulated {
        times: shifted.times().to_vec(),
        values: r.alpha.clone(),
    };
    let rescaled = Flow::new("rescaled")
        .with_term(Arc::new(Subdifferential::new(phi)), alpha, "alpha")
        .with_term(Arc::new(Subdifferential::new(psi)), Schedule::constant(1.0), "one");
    let b = integrate(&rescaled, &x0, &shifted, &IntegrateOptions::default()).unwrap();
    let gap = (a.final_state() - b.final_state()).norm();
    assert!(gap < 1e-2, "{gap}");
}

#[test]
fn catching_up_follows_a_translating_ball() {
    let ball = Arc::new(Ball::new(Vector::zeros(2), 1.0).unwrap());
    let drift = VectorPath::new(vector(&[3.0, 0.0]), vector(&[-3.0, 0.0]), Schedule::Exponential { c: 1.0, r: -1.0 });
    let sets = TranslatingSet::new(ball, drift.clone()).unwrap();
    let grid = TimeGrid::uniform(0.0, 20.0, 0.01).unwrap();
    let x0 = vector(&[-0.5, 0.0]);
    let traj = catching_up(&sets, None, &x0, &grid, 1).unwrap();
    use monoflow::integrator::MovingSet;
    for (t, x) in traj.times.iter().zip(&traj.states) {
        assert!(sets.at(*t).distance(x) < 1e-12);
    }
    // The center moves 3 units to the right; the point is dragged along the
    // trailing boundary and ends 2 units from its start.
    let end = traj.final_state();
    assert!((end - vector(&[2.0, 0.0])).norm() < 1e-3, "{end}");
}

#[test]
fn catching_up_displacement_bounded_by_drift_variation() {
    let half = Arc::new(Halfspace::new(vector(&[1.0, 0.0]), 0.0).unwrap());
    let decay = Schedule::Logarithmic { c: 1.0, p: -1.0 };
    let drift = VectorPath::new(vector(&[-3.0, 0.0]), vector(&[2.0, 0.0]), decay);
    let sets = TranslatingSet::new(half, drift.clone()).unwrap();
    let grid = TimeGrid::uniform(0.0, 200.0, 0.05).unwrap();
    let traj = catching_up(&sets, None, &vector(&[-0.5, 1.0]), &grid, 1).unwrap();
    let moved: f64 = traj.states.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum();
    let variation: f64 = grid
        .times()
        .windows(2)
        .map(|w| (drift.value(w[1]) - drift.value(w[0])).norm())
        .sum();
    assert!(moved <= variation + 1e-12, "{moved} > {variation}");
    assert!(moved > 0.0);
}

#[test]
fn catching_up_rejects_infeasible_start() {
    let ball = Arc::new(Ball::new(Vector::zeros(2), 1.0).unwrap());
    let grid = TimeGrid::uniform(0.0, 1.0, 0.1).unwrap();
    let err = catching_up(&StaticSet(ball), None, &vector(&[2.0, 0.0]), &grid, 1).unwrap_err();
    assert!(matches!(err, Error::InfeasibleStart { .. }), "{err}");
}

fn contraction_flow() -> Flow {
    let params = Params::new();
    Flow::new("rotation + ball penalty")
        .with_term(Arc::new(LinearOperator::rotation2d()), Schedule::constant(1.0), "one")
        .with_term(
            catalog::operator("subdiff:half_sq_dist_ball", 2, &params).unwrap(),
            Schedule::power(1.0, 0.5),
            "beta",
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn paired_trajectories_do_not_separate(
        a in prop::collection::vec(-4.0..4.0f64, 2),
        b in prop::collection::vec(-4.0..4.0f64, 2),
    ) {
        let flow = contraction_flow();
        let grid = TimeGrid::uniform(0.0, 5.0, 0.05).unwrap();
        let opts = IntegrateOptions::default();
        let x = integrate(&flow, &Vector::from_vec(a), &grid, &opts).unwrap();
        let y = integrate(&flow, &Vector::from_vec(b), &grid, &opts).unwrap();
        let gaps: Vec<f64> = x.states.iter().zip(&y.states).map(|(p, q)| (p - q).norm()).collect();
        for w in gaps.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-7) + 1e-9, "{} > {}", w[1], w[0]);
        }
    }
}
