//! Brézis–Haraux, Fitzpatrick and penalty functions of monotone operators.
//!
//! `G_M(x, u) = sup_{(y, v) ∈ gph M} ⟨x − y, v − u⟩`,
//! `F_M(x, u) = G_M(x, u) + ⟨x, u⟩`,
//! `P_M(x, u) = ‖x − (I + M)⁻¹(x + u)‖²`, with `G_M ≥ P_M`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{Matrix, PsdForm, Vector};
use crate::operator_core::operators::bh_affine;
use crate::operator_core::{ConvexFunction, MonotoneOperator};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationKind {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct BHEvaluation {
    pub value: ExtReal,
    pub kind: EvaluationKind,
    pub sample_count: usize,
    /// Graph pair attaining the reported sampled supremum.
    #[serde(skip)]
    pub witness: Option<(Vector, Vector)>,
}

impl BHEvaluation {
    fn exact(value: ExtReal) -> Self {
        Self {
            value,
            kind: EvaluationKind::Exact,
            sample_count: 0,
            witness: None,
        }
    }
}

/// Graph-sampling parameters for lower-bound estimates.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    /// Radius of the sampling ball; defaults to `10 · max(‖x‖, ‖u‖, 1)`.
    pub radius: Option<f64>,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            radius: None,
            seed: DEFAULT_SEED,
        }
    }
}

/// Exact value when the operator has a closed form, otherwise a sampled
/// lower bound over `budget` graph points.
pub fn brezis_haraux(
    m: &dyn MonotoneOperator,
    x: &Vector,
    u: &Vector,
    budget: usize,
) -> Result<BHEvaluation> {
    if let Some(value) = m.bh_closed_form(x, u) {
        return Ok(BHEvaluation::exact(value));
    }
    brezis_haraux_sampled(m, x, u, budget, Sampling::default())
}

/// Sampled lower bound `max(0, max_k ⟨x − y_k, v_k − u⟩)`; `G_M ≥ 0` holds for
/// every maximal monotone `M`. Samples are drawn sequentially from a seeded
/// stream, so the bound is nondecreasing in `budget`.
pub fn brezis_haraux_sampled(
    m: &dyn MonotoneOperator,
    x: &Vector,
    u: &Vector,
    budget: usize,
    sampling: Sampling,
) -> Result<BHEvaluation> {
    if !m.has_graph_sampler() {
        return Err(Error::NoEvaluator(m.name()));
    }
    let radius = sampling
        .radius
        .unwrap_or_else(|| 10.0 * x.norm().max(u.norm()).max(1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let samples = m.sample_graph(budget, radius, &mut rng)?;
    let mut best = 0.0;
    let mut witness = None;
    for (y, v) in samples {
        let val = (x - &y).dot(&(&v - u));
        if val > best {
            best = val;
            witness = Some((y, v));
        }
    }
    Ok(BHEvaluation {
        value: ExtReal::Finite(best),
        kind: EvaluationKind::LowerBound,
        sample_count: budget,
        witness,
    })
}

pub fn fitzpatrick(
    m: &dyn MonotoneOperator,
    x: &Vector,
    u: &Vector,
    budget: usize,
) -> Result<BHEvaluation> {
    let mut eval = brezis_haraux(m, x, u, budget)?;
    eval.value = eval.value + x.dot(u);
    Ok(eval)
}

/// `‖x − (I + M)⁻¹(x + u)‖²`.
pub fn penalty_p(m: &dyn MonotoneOperator, x: &Vector, u: &Vector) -> Result<f64> {
    let j = m.resolvent(1.0, &(x + u))?;
    Ok((x - j).norm_squared())
}

/// `f(z) + f*(u) − ⟨z, u⟩ ≥ G_{∂f}(z, u)`.
pub fn bh_subdifferential_upper(f: &dyn ConvexFunction, z: &Vector, u: &Vector) -> Result<ExtReal> {
    let conj = f.conjugate(u)?;
    Ok(f.value(z) + conj - z.dot(u))
}

/// `G_A(x, u) = 2 q_A*(½u + ½Ax) − ⟨x, u⟩` for symmetric positive-semidefinite `A`.
pub fn bh_linear_selfadjoint(a: &Matrix, x: &Vector, u: &Vector) -> Result<ExtReal> {
    let form = PsdForm::new(a)?;
    Ok(bh_affine(a, &form, &Vector::zeros(x.len()), x, u))
}

/// `G_A(z, q) + G_B(z, p − q) ≥ G_{A+B}(z, p)`.
pub fn bh_sum_upper(
    a: &dyn MonotoneOperator,
    b: &dyn MonotoneOperator,
    z: &Vector,
    p: &Vector,
    q: &Vector,
) -> Result<ExtReal> {
    let ga = a
        .bh_closed_form(z, q)
        .ok_or_else(|| Error::NoEvaluator(a.name()))?;
    let gb = b
        .bh_closed_form(z, &(p - q))
        .ok_or_else(|| Error::NoEvaluator(b.name()))?;
    Ok(ga + gb)
}

/// `‖(I + A_t)⁻¹ y − (I + A_∞)⁻¹ y‖²`.
pub fn resolvent_gap(
    a_t: &dyn MonotoneOperator,
    a_inf: &dyn MonotoneOperator,
    y: &Vector,
) -> Result<f64> {
    let jt = a_t.resolvent(1.0, y)?;
    let jinf = a_inf.resolvent(1.0, y)?;
    Ok((jt - jinf).norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext_real::PosInf;
    use crate::linalg::vector;
    use crate::operator_core::functions::{Indicator, QuadraticFunction};
    use crate::operator_core::operators::{LinearOperator, NormalCone, ShiftedOperator};
    use crate::operator_core::sets::{Ball, Halfspace, Singleton};
    use std::sync::Arc;

    #[test]
    fn normal_cone_of_point() {
        let m = NormalCone::new(Arc::new(Singleton::new(vector(&[0.0]))));
        let g = brezis_haraux(&m, &vector(&[0.0]), &vector(&[5.0]), 0).unwrap();
        assert_eq!(g.value, ExtReal::ZERO);
        assert_eq!(g.kind, EvaluationKind::Exact);
    }

    #[test]
    fn identity_closed_form_against_dense_graph() {
        let m = LinearOperator::identity(2);
        let (x, u) = (vector(&[1.0, 0.0]), vector(&[3.0, 0.0]));
        assert_eq!(brezis_haraux(&m, &x, &u, 0).unwrap().value, ExtReal::Finite(1.0));
        assert_eq!(fitzpatrick(&m, &x, &u, 0).unwrap().value, ExtReal::Finite(4.0));
        // sup over y of ⟨x − y, y − u⟩ on a dense grid of the graph {(y, y)}.
        let mut best = f64::NEG_INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                let y = vector(&[-2.0 + 0.01 * i as f64, -2.0 + 0.01 * j as f64]);
                best = best.max((&x - &y).dot(&(&y - &u)));
            }
        }
        assert!((best - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_cone_outside_domain() {
        let m = NormalCone::new(Arc::new(Halfspace::new(vector(&[-1.0]), 0.0).unwrap()));
        let (x, u) = (vector(&[-1.0]), vector(&[0.0]));
        assert_eq!(brezis_haraux(&m, &x, &u, 0).unwrap().value, PosInf);
        // Graph pairs (0, v), v ≤ 0, give ⟨x − 0, v − u⟩ = −v: the sampled
        // supremum grows without bound with the sampling radius.
        let small = Sampling { radius: Some(10.0), seed: 1 };
        let large = Sampling { radius: Some(1000.0), seed: 1 };
        let g_small = brezis_haraux_sampled(&m, &x, &u, 500, small).unwrap().value.to_f64();
        let g_large = brezis_haraux_sampled(&m, &x, &u, 500, large).unwrap().value.to_f64();
        assert!(g_small > 1.0 && g_large > 50.0 * g_small);
        assert_eq!(penalty_p(&m, &x, &u).unwrap(), 1.0);
    }

    #[test]
    fn zero_operator_is_indicator_of_zero_dual() {
        let m = LinearOperator::zero(2);
        let x = vector(&[3.0, -1.0]);
        assert_eq!(fitzpatrick(&m, &x, &vector(&[0.0, 1e-3]), 0).unwrap().value, PosInf);
        assert_eq!(fitzpatrick(&m, &x, &vector(&[0.0, 0.0]), 0).unwrap().value, ExtReal::ZERO);
    }

    #[test]
    fn penalty_values() {
        let m = LinearOperator::identity(2);
        let p = penalty_p(&m, &vector(&[1.0, 0.0]), &vector(&[3.0, 0.0])).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        let c = NormalCone::new(Arc::new(Halfspace::new(vector(&[1.0]), 0.0).unwrap()));
        assert_eq!(penalty_p(&c, &vector(&[1.0]), &vector(&[0.0])).unwrap(), 1.0);
    }

    #[test]
    fn subdifferential_upper_bounds() {
        let f = QuadraticFunction::half_squared_norm(1);
        let z = vector(&[1.0]);
        assert_eq!(bh_subdifferential_upper(&f, &z, &z).unwrap(), ExtReal::ZERO);
        assert_eq!(
            bh_subdifferential_upper(&f, &z, &vector(&[3.0])).unwrap(),
            ExtReal::Finite(2.0)
        );
        let ball = Indicator::new(Arc::new(Ball::unit(1)));
        assert_eq!(
            bh_subdifferential_upper(&ball, &vector(&[1.0]), &vector(&[2.0])).unwrap(),
            ExtReal::ZERO
        );
    }

    #[test]
    fn linear_selfadjoint_values() {
        let id = Matrix::identity(1, 1);
        assert_eq!(
            bh_linear_selfadjoint(&id, &vector(&[1.0]), &vector(&[3.0])).unwrap(),
            ExtReal::Finite(1.0)
        );
        let zero = Matrix::zeros(1, 1);
        assert_eq!(bh_linear_selfadjoint(&zero, &vector(&[1.0]), &vector(&[3.0])).unwrap(), PosInf);
        assert_eq!(
            bh_linear_selfadjoint(&zero, &vector(&[1.0]), &vector(&[0.0])).unwrap(),
            ExtReal::ZERO
        );
        let d = Matrix::from_diagonal(&vector(&[1.0, 0.0]));
        assert_eq!(
            bh_linear_selfadjoint(&d, &vector(&[0.0, 0.0]), &vector(&[0.0, 1.0])).unwrap(),
            PosInf
        );
    }

    #[test]
    fn sum_upper_for_two_identities() {
        let i = LinearOperator::identity(1);
        let v = bh_sum_upper(&i, &i, &vector(&[0.0]), &vector(&[2.0]), &vector(&[1.0])).unwrap();
        assert_eq!(v, ExtReal::Finite(0.5));
    }

    #[test]
    fn resolvent_gap_for_shift() {
        let id: Arc<dyn MonotoneOperator> = Arc::new(LinearOperator::identity(1));
        let shifted = ShiftedOperator::new(id.clone(), vector(&[1.0])).unwrap();
        let gap = resolvent_gap(&shifted, id.as_ref(), &vector(&[0.0])).unwrap();
        assert!((gap - 0.25).abs() < 1e-15);
        assert_eq!(resolvent_gap(id.as_ref(), id.as_ref(), &vector(&[0.7])).unwrap(), 0.0);
    }

    #[test]
    fn sampled_bound_is_monotone_in_budget() {
        let ball = Indicator::new(Arc::new(Ball::unit(2)));
        let m = crate::operator_core::operators::Subdifferential::new(Arc::new(ball));
        let (x, u) = (vector(&[2.0, 0.5]), vector(&[-1.0, 0.3]));
        let mut last = 0.0;
        for budget in [1, 10, 100, 1000] {
            let g = brezis_haraux_sampled(&m, &x, &u, budget, Sampling::default()).unwrap();
            let v = g.value.to_f64();
            assert!(v >= last);
            last = v;
        }
    }
}
