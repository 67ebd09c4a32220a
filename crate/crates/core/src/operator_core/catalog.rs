//! String-addressable catalog of sets, functions and operators.
//!
//! Parameters are passed as a name → number map; unspecified parameters take
//! the defaults listed in [`FUNCTION_IDS`] and [`OPERATOR_IDS`].

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, Matrix, Vector};
use crate::operator_core::functions::{
    FunctionRef, HalfSquaredDistance, Indicator, LinearFunction, PlanarBarrier, PlanarObjective,
    QuadraticFunction, ZeroFunction,
};
use crate::operator_core::operators::{LinearOperator, NormalCone, OperatorRef, Subdifferential};
use crate::operator_core::sets::{Ball, BoxSet, Halfspace, SetRef};

pub type Params = BTreeMap<String, f64>;

pub const FUNCTION_IDS: &[(&str, &str)] = &[
    ("zero", "f = 0"),
    ("half_squared_norm", "½‖x‖²"),
    ("linear", "⟨e_k, x⟩ with k = index (default 0)"),
    ("ball_indicator", "indicator of the ball of the given radius (default 1)"),
    ("halfspace_indicator", "indicator of {x_k ≤ offset} (index 0, offset 0)"),
    ("box_indicator", "indicator of [lower, upper]^n (−1, 1)"),
    ("half_sq_dist_hyperplane", "½ x_k² (index 0): squared distance to {x_k = 0}"),
    ("shifted_quadratic", "½(x_k − center)² (index 0, center 1)"),
    ("planar_barrier", "planar barrier y²/(2(a² − x²)) (a = 2)"),
    ("planar_objective", "planar objective y + ½[x−b]₊² + ½[x+b]₋² (b = 1)"),
];

pub const OPERATOR_IDS: &[(&str, &str)] = &[
    ("identity", "x ↦ x"),
    ("zero", "x ↦ 0"),
    ("rotation2d", "x ↦ Jx, J = [[0, −1], [1, 0]]"),
    ("psd_diag", "x ↦ diag(1, 0, 1, 0, ...) x"),
    ("ball_indicator", "normal cone of the ball (radius 1)"),
    ("halfspace_indicator", "normal cone of {x_k ≤ offset}"),
    ("box_indicator", "normal cone of [lower, upper]^n"),
    ("subdiff:<function id>", "subdifferential of a catalog function"),
];

fn param(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn index_param(params: &Params, n: usize) -> Result<usize> {
    let k = param(params, "index", 0.0);
    if k < 0.0 || k.fract() != 0.0 || k as usize >= n {
        return Err(Error::Config(format!("index {k} out of range for dimension {n}")));
    }
    Ok(k as usize)
}

pub fn set(id: &str, n: usize, params: &Params) -> Result<SetRef> {
    Ok(match id {
        "ball" | "ball_indicator" => Arc::new(Ball::new(Vector::zeros(n), param(params, "radius", 1.0))?),
        "halfspace" | "halfspace_indicator" => {
            let k = index_param(params, n)?;
            Arc::new(Halfspace::new(basis_vector(n, k), param(params, "offset", 0.0))?)
        }
        "box" | "box_indicator" => Arc::new(BoxSet::new(
            Vector::from_element(n, param(params, "lower", -1.0)),
            Vector::from_element(n, param(params, "upper", 1.0)),
        )?),
        other => return Err(Error::Config(format!("unknown set id `{other}`"))),
    })
}

pub fn function(id: &str, n: usize, params: &Params) -> Result<FunctionRef> {
    let planar = |name: &str| {
        if n == 2 {
            Ok(())
        } else {
            Err(Error::Config(format!("`{name}` is planar; dimension {n} requested")))
        }
    };
    Ok(match id {
        "zero" => Arc::new(ZeroFunction(n)),
        "half_squared_norm" => Arc::new(QuadraticFunction::half_squared_norm(n)),
        "linear" => Arc::new(LinearFunction::new(basis_vector(n, index_param(params, n)?), 0.0)),
        "ball_indicator" | "halfspace_indicator" | "box_indicator" => {
            Arc::new(Indicator::new(set(id, n, params)?))
        }
        "half_sq_dist_hyperplane" => {
            let k = index_param(params, n)?;
            let mut q = Matrix::zeros(n, n);
            q[(k, k)] = 1.0;
            Arc::new(QuadraticFunction::new(q, Vector::zeros(n), 0.0)?)
        }
        "shifted_quadratic" => {
            let k = index_param(params, n)?;
            let c = param(params, "center", 1.0);
            let mut q = Matrix::zeros(n, n);
            q[(k, k)] = 1.0;
            Arc::new(QuadraticFunction::new(q, basis_vector(n, k) * (-c), 0.5 * c * c)?)
        }
        "half_sq_dist_ball" => Arc::new(HalfSquaredDistance::new(set("ball", n, params)?)),
        "planar_barrier" => {
            planar(id)?;
            Arc::new(PlanarBarrier::new(param(params, "a", 2.0))?)
        }
        "planar_objective" => {
            planar(id)?;
            Arc::new(PlanarObjective::new(param(params, "b", 1.0))?)
        }
        other => return Err(Error::Config(format!("unknown function id `{other}`"))),
    })
}

pub fn operator(id: &str, n: usize, params: &Params) -> Result<OperatorRef> {
    if let Some(fid) = id.strip_prefix("subdiff:") {
        return Ok(Arc::new(Subdifferential::new(function(fid, n, params)?)));
    }
    Ok(match id {
        "identity" => Arc::new(LinearOperator::identity(n)),
        "zero" => Arc::new(LinearOperator::zero(n)),
        "rotation2d" => {
            if n != 2 {
                return Err(Error::Config("`rotation2d` is planar".into()));
            }
            Arc::new(LinearOperator::rotation2d())
        }
        "psd_diag" => {
            let d = Vector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { 0.0 });
            Arc::new(LinearOperator::linear(Matrix::from_diagonal(&d))?)
        }
        "ball_indicator" | "halfspace_indicator" | "box_indicator" => {
            Arc::new(NormalCone::new(set(id, n, params)?))
        }
        "planar_barrier" | "planar_objective" => Arc::new(Subdifferential::new(function(id, n, params)?)),
        other => return Err(Error::Config(format!("unknown operator id `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn lookups() {
        let p = Params::new();
        let j = operator("rotation2d", 2, &p).unwrap();
        assert_eq!(j.resolvent(1.0, &vector(&[1.0, 0.0])).unwrap(), vector(&[0.5, -0.5]));
        let psi = function("planar_barrier", 2, &p).unwrap();
        assert_eq!(psi.value(&vector(&[0.0, 2.0])).to_f64(), 0.5);
        assert!(operator("rotation2d", 3, &p).is_err());
        assert!(function("nope", 2, &p).is_err());
        let sub = operator("subdiff:half_squared_norm", 1, &p).unwrap();
        assert!((sub.resolvent(1.0, &vector(&[4.0])).unwrap()[0] - 2.0).abs() < 1e-15);
    }
}
