use monoflow::operator_core::catalog::{self, Params};
use monoflow::operator_core::functions::{PlanarBarrier, PlanarObjective};
use monoflow::operator_core::sets::{AffineSubspace, Ball, Halfspace};
use monoflow::viscosity_omega::{
    asymptotic_slope, check_normalization, hausdorff_bound, omega_dual, omega_primal, OmegaOptions,
};
use monoflow::{vector, Error, Vector};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planar_primal_and_dual_agree(eps in 1e-3..1.0f64, a in 1.0..3.0f64) {
        let psi = PlanarBarrier::new(a).unwrap();
        let phi = PlanarObjective::new(0.5).unwrap();
        let r = omega_dual(&psi, &phi, eps, None, &OmegaOptions::default()).unwrap();
        let exact = -a * a * eps * eps / 2.0;
        prop_assert!((r.primal_value.to_f64() - exact).abs() < 1e-8);
        prop_assert!(r.gap.unwrap() < 1e-6);
    }

    #[test]
    fn omega_is_concave_along_random_triples(e1 in 0.0..1.0f64, e2 in 0.0..1.0f64, s in 0.0..1.0f64) {
        let params = Params::new();
        let psi = catalog::function("half_sq_dist_hyperplane", 2, &params).unwrap();
        let phi = catalog::function("linear", 2, &params).unwrap();
        let opts = OmegaOptions::default();
        let w = |e: f64| omega_primal(psi.as_ref(), phi.as_ref(), e, None, &opts).unwrap().primal_value.to_f64();
        let mid = s * e1 + (1.0 - s) * e2;
        prop_assert!(w(mid) >= s * w(e1) + (1.0 - s) * w(e2) - 1e-8);
    }
}

#[test]
fn slope_decreases_for_quadratic_growth() {
    let psi = PlanarBarrier::new(2.0).unwrap();
    let phi = PlanarObjective::new(1.0).unwrap();
    let r = asymptotic_slope(&psi, &phi, &[1.0, 0.1, 0.01, 0.001], &OmegaOptions::default()).unwrap();
    assert!(r.monotone_decrease);
    assert!((r.slopes[3] + 2.0 * 0.001).abs() < 1e-8);
}

#[test]
fn slope_grid_must_decrease() {
    let psi = PlanarBarrier::new(2.0).unwrap();
    let phi = PlanarObjective::new(1.0).unwrap();
    let err = asymptotic_slope(&psi, &phi, &[0.1, 1.0], &OmegaOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter(_)));
}

#[test]
fn negative_epsilon_is_rejected() {
    let psi = PlanarBarrier::new(2.0).unwrap();
    let phi = PlanarObjective::new(1.0).unwrap();
    assert!(omega_primal(&psi, &phi, -1.0, None, &OmegaOptions::default()).is_err());
}

#[test]
fn hausdorff_bound_vanishes_for_cones() {
    let half = Halfspace::new(vector(&[1.0, 1.0]), 0.0).unwrap();
    let b = hausdorff_bound(&half, 0.5, &vector(&[3.0, -1.0]), 200).unwrap();
    assert!(b.value.abs() < 1e-12);
    assert!(b.haus_rho.unwrap().abs() < 1e-12);

    let ball = Ball::new(Vector::zeros(2), 1.0).unwrap();
    let b = hausdorff_bound(&ball, 1.0, &vector(&[3.0, 0.0]), 0).unwrap();
    // Tangent cone of the ball at an interior point is the whole plane.
    assert!((b.value - 2.0).abs() < 1e-12);
}

#[test]
fn normalization_detects_offsets() {
    let params = Params::new();
    let psi = catalog::function("half_sq_dist_hyperplane", 2, &params).unwrap();
    let phi = catalog::function("shifted_quadratic", 2, &params).unwrap();
    let line = AffineSubspace::new(Vector::zeros(2), &[vector(&[0.0, 1.0])]);
    let r = check_normalization(psi.as_ref(), phi.as_ref(), &line, 1e-8).unwrap();
    // Φ = ½(x₁ − 1)² equals ½ everywhere on {x₁ = 0}.
    assert!(r.psi_inf.abs() < 1e-12);
    assert!((r.phi_inf_on_c - 0.5).abs() < 1e-6, "{r:?}");
    assert!(!r.normalized);
}
