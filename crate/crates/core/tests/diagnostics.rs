use std::sync::Arc;

use monoflow::diagnostics::{
    check_condition, check_integrand, ergodic_average, oscillation_measure, running_average, strong_minimum_check,
    ConditionId, ConditionProblem, SummabilityProtocol, Verdict,
};
use monoflow::integrator::{integrate, Flow, IntegrateOptions, Schedule, TimeGrid};
use monoflow::operator_core::operators::LinearOperator;
use monoflow::{vector, ExtReal, Vector};
use proptest::prelude::*;

fn classify_power(p: f64) -> Verdict {
    let g = move |t: f64| Ok((1.0 + t).powf(p));
    check_integrand(ConditionId::SlowEps, &g, &SummabilityProtocol::default())
        .unwrap()
        .verdict
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_power_laws_are_summable(p in -3.0..-1.1f64) {
        prop_assert_eq!(classify_power(p), Verdict::Summable);
    }

    #[test]
    fn slow_power_laws_diverge(p in -0.9..0.5f64) {
        prop_assert_eq!(classify_power(p), Verdict::Divergent);
    }

    #[test]
    fn ergodic_averages_do_not_separate(
        a in prop::collection::vec(-3.0..3.0f64, 2),
        b in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let flow = Flow::autonomous(Arc::new(LinearOperator::rotation2d()));
        let grid = TimeGrid::uniform(0.0, 20.0, 0.01).unwrap();
        let opts = IntegrateOptions::default();
        let (x0, y0) = (Vector::from_vec(a), Vector::from_vec(b));
        let x = ergodic_average(&integrate(&flow, &x0, &grid, &opts).unwrap());
        let y = ergodic_average(&integrate(&flow, &y0, &grid, &opts).unwrap());
        let start = (&x0 - &y0).norm();
        for (p, q) in x.states.iter().zip(&y.states) {
            prop_assert!((p - q).norm() <= start * (1.0 + 1e-12) + 1e-12);
        }
    }
}

#[test]
fn band_exponent_is_not_called_summable() {
    assert_ne!(classify_power(-1.0), Verdict::Summable);
}

#[test]
fn zero_integrand_is_summable() {
    let g = |_t: f64| Ok(0.0);
    let v = check_integrand(ConditionId::C1, &g, &SummabilityProtocol::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Summable);
    assert!(v.partial_sums.iter().all(|(_, s)| *s == 0.0));
}

#[test]
fn partial_sums_match_closed_form() {
    let g = |t: f64| Ok((1.0 + t).powi(-2));
    let v = check_integrand(ConditionId::C1, &g, &SummabilityProtocol::default()).unwrap();
    for (t, s) in v.partial_sums {
        let exact = 1.0 - 1.0 / (1.0 + t);
        assert!((s - exact).abs() < 1e-4 * exact, "T = {t}: {s} vs {exact}");
    }
}

#[test]
fn slow_epsilon_condition_for_harmonic_schedule() {
    let problem = ConditionProblem::SlowEps {
        epsilon: Schedule::power(1.0, -1.0),
    };
    let v = check_condition(&problem, &SummabilityProtocol::default()).unwrap();
    assert_eq!(v.condition_id, ConditionId::SlowEps);
    assert_eq!(v.verdict, Verdict::Divergent);
}

#[test]
fn running_average_of_linear_samples() {
    let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
    let states: Vec<Vector> = times.iter().map(|&t| vector(&[t, 1.0])).collect();
    let avg = running_average(&times, &states);
    let last = avg.last().unwrap();
    assert!((last[0] - 5.0).abs() < 1e-12 && (last[1] - 1.0).abs() < 1e-12);
}

#[test]
fn rotation_oscillates_but_averages_out() {
    let flow = Flow::autonomous(Arc::new(LinearOperator::rotation2d()));
    let grid = TimeGrid::uniform(0.0, 200.0, 1e-3).unwrap();
    let traj = integrate(&flow, &vector(&[1.0, 0.0]), &grid, &IntegrateOptions::default().with_stride(100)).unwrap();
    assert!(oscillation_measure(&traj, 0.1) > 0.8);
    assert!(traj.ergodic_states.last().unwrap().norm() < 2e-2);
}

#[test]
fn strong_minimum_counts_violations() {
    let f = |x: &Vector| ExtReal::Finite(x.norm_squared());
    let pts = vec![vector(&[1.0, 0.0]), vector(&[0.0, 2.0])];
    let ok = strong_minimum_check(&f, &Vector::zeros(2), 1.0, &pts, 1e-12);
    assert_eq!(ok.violations, 0);
    let bad = strong_minimum_check(&f, &Vector::zeros(2), 1.5, &pts, 1e-12);
    assert_eq!(bad.violations, 2);
}
