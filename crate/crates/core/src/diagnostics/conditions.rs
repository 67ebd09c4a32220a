use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::fitzpatrick::{brezis_haraux, EvaluationKind};
use crate::integrator::{Flow, Schedule, VectorPath};
use crate::linalg::Vector;
use crate::operator_core::{FunctionRef, MonotoneOperator, OperatorRef, SetRef, SubspaceSplit};
use crate::viscosity_omega::{omega_primal, OmegaOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    #[serde(rename = "slow_eps")]
    SlowEps,
    #[serde(rename = "slow_alpha")]
    SlowAlpha,
    #[serde(rename = "L2_perp")]
    L2Perp,
    #[serde(rename = "L1_F")]
    L1F,
    #[serde(rename = "sweep_L2")]
    SweepL2,
}

impl ConditionId {
    pub const ALL: [ConditionId; 12] = [
        ConditionId::C1,
        ConditionId::C2,
        ConditionId::C3,
        ConditionId::C4,
        ConditionId::C5,
        ConditionId::C6,
        ConditionId::C7,
        ConditionId::SlowEps,
        ConditionId::SlowAlpha,
        ConditionId::L2Perp,
        ConditionId::L1F,
        ConditionId::SweepL2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConditionId::C1 => "C1",
            ConditionId::C2 => "C2",
            ConditionId::C3 => "C3",
            ConditionId::C4 => "C4",
            ConditionId::C5 => "C5",
            ConditionId::C6 => "C6",
            ConditionId::C7 => "C7",
            ConditionId::SlowEps => "slow_eps",
            ConditionId::SlowAlpha => "slow_alpha",
            ConditionId::L2Perp => "L2_perp",
            ConditionId::L1F => "L1_F",
            ConditionId::SweepL2 => "sweep_L2",
        }
    }

    /// Short description of the integrand.
    pub fn integrand(self) -> &'static str {
        match self {
            ConditionId::C1 => "G_{A_t}(z, p)",
            ConditionId::C2 => "beta(t) G_B(z, q/beta(t))",
            ConditionId::C3 => "G_A(z, eps(t) q)",
            ConditionId::C4 => "beta(t) [Psi*(p/beta(t)) - sigma_C(p/beta(t))]",
            ConditionId::C5 => "G_{d phi_t}(z, 0)",
            ConditionId::C6 => "phi_t(z) - inf phi_t",
            ConditionId::C7 => "beta(t) |omega(1/beta(t))|",
            ConditionId::SlowEps => "eps(t)",
            ConditionId::SlowAlpha => "alpha(t)",
            ConditionId::L2Perp => "|Pi_{F_perp}(f(t) - f_inf)|^2",
            ConditionId::L1F => "|Pi_F(f(t) - f_inf)|",
            ConditionId::SweepL2 => "|z(t) - z_inf|^2 for the moving set's drift",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionId::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown condition `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Summable,
    Divergent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Summable => "summable",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Horizons, node density and thresholds of the summability classification.
#[derive(Debug, Clone, Serialize)]
pub struct SummabilityProtocol {
    pub horizons: Vec<f64>,
    pub nodes_per_decade: usize,
    pub cauchy_tol: f64,
    pub divergence_threshold: f64,
    /// Tail exponents at or below this classify as summable.
    pub summable_exponent: f64,
    /// Tail exponents at or above this classify as divergent (`−1` up to
    /// the fitting tolerance).
    pub divergent_exponent: f64,
    /// Integrands below this everywhere count as identically zero.
    pub zero_tol: f64,
}

impl Default for SummabilityProtocol {
    fn default() -> Self {
        Self {
            horizons: vec![1e2, 1e3, 1e4],
            nodes_per_decade: 256,
            cauchy_tol: 1e-3,
            divergence_threshold: 1e6,
            summable_exponent: -1.05,
            divergent_exponent: -1.0 - 1e-3,
            zero_tol: 1e-14,
        }
    }
}

impl SummabilityProtocol {
    /// Sample times: `1 + t` log-spaced from 1 to `1 + T_max`, plus every horizon.
    pub fn nodes(&self) -> Vec<f64> {
        let t_max = self.horizons.iter().copied().fold(0.0, f64::max);
        let decades = (1.0 + t_max).log10();
        let count = (decades * self.nodes_per_decade as f64).ceil() as usize;
        let near_horizon = |t: f64| {
            self.horizons
                .iter()
                .any(|&h| (t - h).abs() <= 1e-9 * (1.0 + h))
        };
        let mut nodes: Vec<f64> = (0..=count)
            .map(|k| 10f64.powf(decades * k as f64 / count as f64) - 1.0)
            .filter(|&t| !near_horizon(t))
            .collect();
        nodes.extend(self.horizons.iter().copied());
        nodes.sort_by(|a, b| a.total_cmp(b));
        nodes.dedup();
        nodes
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub condition_id: ConditionId,
    /// `(T, ∫_0^T g)` for each horizon.
    pub partial_sums: Vec<(f64, f64)>,
    /// Least-squares slope of `log g` against `log(1 + t)` on the last decade.
    pub tail_exponent: Option<f64>,
    pub verdict: Verdict,
    /// Largest horizon used.
    pub horizon: f64,
    pub evidence: String,
}

/// Integrand sample; `exact = false` marks a lower bound.
#[derive(Debug, Clone, Copy)]
struct Sample {
    value: f64,
    exact: bool,
}

/// Ingredients of each condition's integrand.
#[derive(Clone)]
pub enum ConditionProblem {
    /// `∫ G_{A_t}(z, p)`.
    C1 { flow: Flow, z: Vector, p: Vector, budget: usize },
    /// `∫ β G_B(z, q/β)`.
    C2 { b: OperatorRef, beta: Schedule, z: Vector, q: Vector, budget: usize },
    /// `∫ G_A(z, ε q)`.
    C3 { a: OperatorRef, epsilon: Schedule, z: Vector, q: Vector, budget: usize },
    /// `∫ β [Ψ*(p/β) − σ_C(p/β)]`.
    C4 { psi: FunctionRef, set: SetRef, beta: Schedule, p: Vector },
    /// `∫ G_{∂φ_t}(z, 0)` with `∂φ_t` the flow's operator.
    C5 { flow: Flow, z: Vector, budget: usize },
    /// `∫ φ_t(z) − inf φ_t` for `φ_t = Φ + ε(t)Ψ`.
    C6 { phi: FunctionRef, psi: FunctionRef, epsilon: Schedule, z: Vector },
    /// `∫ β |ω(1/β)|`, `ω(ε) = inf Ψ + εΦ`.
    C7 { psi: FunctionRef, phi: FunctionRef, beta: Schedule },
    SlowEps { epsilon: Schedule },
    SlowAlpha { alpha: Schedule },
    /// `∫ ‖Π_{F⊥}(f − f_∞)‖²`.
    L2Perp { forcing: VectorPath, split: SubspaceSplit },
    /// `∫ ‖Π_F(f − f_∞)‖`.
    L1F { forcing: VectorPath, split: SubspaceSplit },
    /// Any integrand, classified under the given label.
    Custom {
        id: ConditionId,
        integrand: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    },
}

impl fmt::Debug for ConditionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConditionProblem({})", self.id())
    }
}

impl ConditionProblem {
    pub fn id(&self) -> ConditionId {
        match self {
            ConditionProblem::C1 { .. } => ConditionId::C1,
            ConditionProblem::C2 { .. } => ConditionId::C2,
            ConditionProblem::C3 { .. } => ConditionId::C3,
            ConditionProblem::C4 { .. } => ConditionId::C4,
            ConditionProblem::C5 { .. } => ConditionId::C5,
            ConditionProblem::C6 { .. } => ConditionId::C6,
            ConditionProblem::C7 { .. } => ConditionId::C7,
            ConditionProblem::SlowEps { .. } => ConditionId::SlowEps,
            ConditionProblem::SlowAlpha { .. } => ConditionId::SlowAlpha,
            ConditionProblem::L2Perp { .. } => ConditionId::L2Perp,
            ConditionProblem::L1F { .. } => ConditionId::L1F,
            ConditionProblem::Custom { id, .. } => *id,
        }
    }

    fn sample(&self, t: f64) -> Result<Sample> {
        let exact = |value: f64| Ok(Sample { value, exact: true });
        match self {
            ConditionProblem::C1 { flow, z, p, budget } => {
                let a_t = flow.operator_at(t)?;
                bh_sample(a_t.as_ref(), z, p, *budget, 1.0)
            }
            ConditionProblem::C2 { b, beta, z, q, budget } => {
                let w = positive(beta, "beta", t)?;
                bh_sample(b.as_ref(), z, &(q / w), *budget, w)
            }
            ConditionProblem::C3 { a, epsilon, z, q, budget } => {
                let e = positive(epsilon, "epsilon", t)?;
                bh_sample(a.as_ref(), z, &(q * e), *budget, 1.0)
            }
            ConditionProblem::C4 { psi, set, beta, p } => {
                let w = positive(beta, "beta", t)?;
                let arg = p / w;
                let conj = psi.conjugate(&arg).map_err(|_| Error::NoEvaluator(psi.name()))?;
                let support = set
                    .support(&arg)
                    .ok_or_else(|| Error::NoEvaluator(format!("support function of {}", set.name())))?;
                match (conj, support) {
                    (ExtReal::Finite(c), ExtReal::Finite(s)) => exact(w * (c - s)),
                    (ExtReal::PosInf, _) => exact(f64::INFINITY),
                    (ExtReal::Finite(_), ExtReal::PosInf) => Err(Error::InvalidParameter(
                        "p must lie in the barrier cone of C".into(),
                    )),
                }
            }
            ConditionProblem::C5 { flow, z, budget } => {
                let a_t = flow.operator_at(t)?;
                bh_sample(a_t.as_ref(), z, &Vector::zeros(z.len()), *budget, 1.0)
            }
            ConditionProblem::C6 { phi, psi, epsilon, z } => {
                let e = positive(epsilon, "epsilon", t)?;
                let value = phi.value(z) + psi.value(z).scale(e);
                let inf = omega_primal(phi.as_ref(), psi.as_ref(), e, Some(z), &omega_options())?;
                match (value, inf.primal_value) {
                    (ExtReal::Finite(v), ExtReal::Finite(m)) => exact((v - m).max(0.0)),
                    _ => exact(f64::INFINITY),
                }
            }
            ConditionProblem::C7 { psi, phi, beta } => {
                let w = positive(beta, "beta", t)?;
                let om = omega_primal(psi.as_ref(), phi.as_ref(), 1.0 / w, None, &omega_options())?;
                exact(w * om.primal_value.to_f64().abs())
            }
            ConditionProblem::SlowEps { epsilon } => exact(epsilon.value(t)),
            ConditionProblem::SlowAlpha { alpha } => exact(alpha.value(t)),
            ConditionProblem::L2Perp { forcing, split } => {
                let d = forcing.value(t) - forcing.limit();
                exact(split.project_f_perp(&d).norm_squared())
            }
            ConditionProblem::L1F { forcing, split } => {
                let d = forcing.value(t) - forcing.limit();
                exact(split.project_f(&d).norm())
            }
            ConditionProblem::Custom { integrand, .. } => exact(integrand(t)?),
        }
    }
}

fn omega_options() -> OmegaOptions {
    OmegaOptions::default()
}

fn positive(s: &Schedule, name: &str, t: f64) -> Result<f64> {
    let v = s.value(t);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonPositiveSchedule {
            name: name.to_string(),
            t,
        })
    }
}

fn bh_sample(m: &dyn MonotoneOperator, z: &Vector, u: &Vector, budget: usize, factor: f64) -> Result<Sample> {
    let eval = brezis_haraux(m, z, u, budget)?;
    Ok(Sample {
        value: factor * eval.value.to_f64(),
        exact: eval.kind == EvaluationKind::Exact,
    })
}

/// Classifies `∫_0^∞ g` for an arbitrary integrand.
pub fn check_integrand(
    id: ConditionId,
    integrand: &(dyn Fn(f64) -> Result<f64> + Sync),
    protocol: &SummabilityProtocol,
) -> Result<ConditionVerdict> {
    classify(id, &|t| integrand(t).map(|value| Sample { value, exact: true }), protocol)
}

/// Samples the condition's integrand on the protocol grid and classifies it.
pub fn check_condition(problem: &ConditionProblem, protocol: &SummabilityProtocol) -> Result<ConditionVerdict> {
    classify(problem.id(), &|t| problem.sample(t), protocol)
}

fn classify(
    id: ConditionId,
    sample: &(dyn Fn(f64) -> Result<Sample> + Sync),
    protocol: &SummabilityProtocol,
) -> Result<ConditionVerdict> {
    if protocol.horizons.is_empty() || protocol.nodes_per_decade == 0 {
        return Err(Error::InvalidParameter("summability protocol needs horizons and nodes".into()));
    }
    let nodes = protocol.nodes();
    let samples: Vec<Sample> = nodes.par_iter().map(|&t| sample(t)).collect::<Result<_>>()?;
    let horizon = *nodes.last().expect("protocol grid is nonempty");
    let all_exact = samples.iter().all(|s| s.exact);
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();

    let mut partial_sums = Vec::with_capacity(protocol.horizons.len());
    let mut acc = 0.0;
    let mut next = 0;
    let mut horizons = protocol.horizons.clone();
    horizons.sort_by(|a, b| a.total_cmp(b));
    for (k, &t) in nodes.iter().enumerate() {
        if k > 0 {
            acc += 0.5 * (t - nodes[k - 1]) * (values[k] + values[k - 1]);
        }
        while next < horizons.len() && (t - horizons[next]).abs() <= 1e-12 * (1.0 + t) {
            partial_sums.push((horizons[next], acc));
            next += 1;
        }
    }

    let tail_start = nodes.partition_point(|&t| 1.0 + t < (1.0 + horizon) / 10.0);
    let tail_exponent = fit_exponent(&nodes[tail_start..], &values[tail_start..]);
    let nonnegative = values.iter().all(|&v| v >= -protocol.zero_tol);
    let identically_zero = values.iter().all(|v| v.abs() <= protocol.zero_tol);
    let last = partial_sums.last().map(|p| p.1).unwrap_or(0.0);
    let cauchy_gap = match partial_sums.len() {
        n if n >= 2 => {
            let (a, b) = (partial_sums[n - 2].1, partial_sums[n - 1].1);
            Some((b - a).abs() / b.abs().max(a.abs()).max(f64::MIN_POSITIVE))
        }
        _ => None,
    };

    let (mut verdict, mut evidence) = if values.iter().any(|v| v.is_infinite()) {
        (Verdict::Divergent, "integrand is +inf at sampled times".to_string())
    } else if values.iter().any(|v| v.is_nan()) {
        (Verdict::Inconclusive, "integrand is undefined at sampled times".to_string())
    } else if identically_zero {
        (Verdict::Summable, "integrand vanishes at every sampled time".to_string())
    } else if let Some(p) = tail_exponent.filter(|_| nonnegative) {
        if p <= protocol.summable_exponent {
            (Verdict::Summable, format!("tail exponent {p:.4} <= {}", protocol.summable_exponent))
        } else if p >= protocol.divergent_exponent {
            (Verdict::Divergent, format!("tail exponent {p:.4} >= {}", protocol.divergent_exponent))
        } else {
            by_partial_sums(protocol, cauchy_gap, last, format!("tail exponent {p:.4} in the critical band"))
        }
    } else {
        by_partial_sums(protocol, cauchy_gap, last, "no power-law tail".to_string())
    };
    if !all_exact && verdict == Verdict::Summable {
        verdict = Verdict::Inconclusive;
        evidence.push_str("; integrand only bounded below by graph sampling");
    }
    evidence.push_str(&format!("; horizon {horizon}"));
    Ok(ConditionVerdict {
        condition_id: id,
        partial_sums,
        tail_exponent,
        verdict,
        horizon,
        evidence,
    })
}

fn by_partial_sums(
    protocol: &SummabilityProtocol,
    cauchy_gap: Option<f64>,
    last: f64,
    prefix: String,
) -> (Verdict, String) {
    match cauchy_gap {
        Some(gap) if gap < protocol.cauchy_tol => {
            (Verdict::Summable, format!("{prefix}; partial sums Cauchy (relative gap {gap:.2e})"))
        }
        _ if last.abs() > protocol.divergence_threshold => (
            Verdict::Divergent,
            format!("{prefix}; partial sum {last:.3e} exceeds {:.1e}", protocol.divergence_threshold),
        ),
        gap => (
            Verdict::Inconclusive,
            format!("{prefix}; relative gap {:.2e}", gap.unwrap_or(f64::NAN)),
        ),
    }
}

/// Least-squares slope of `log g` on `log(1 + t)`, using positive samples only;
/// `None` unless at least half the samples are positive.
fn fit_exponent(times: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(&t, &v)| ((1.0 + t).ln(), v.ln()))
        .collect();
    if pts.len() < 4 || 2 * pts.len() < times.len() {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(p: f64) -> ConditionVerdict {
        let f = move |t: f64| Ok((1.0 + t).powf(p));
        check_integrand(ConditionId::C1, &f, &SummabilityProtocol::default()).unwrap()
    }

    #[test]
    fn power_law_calibration() {
        for p in [-2.0, -1.5, -1.1] {
            assert_eq!(power(p).verdict, Verdict::Summable, "p = {p}");
        }
        for p in [-0.9, -0.5] {
            assert_eq!(power(p).verdict, Verdict::Divergent, "p = {p}");
        }
        assert_eq!(power(-1.0).verdict, Verdict::Divergent);
        assert_eq!(power(-1.02).verdict, Verdict::Inconclusive);
        let v = power(-1.5);
        assert!((v.tail_exponent.unwrap() + 1.5).abs() < 1e-10);
        assert_eq!(v.partial_sums.len(), 3);
        let exact = 2.0 * (1.0 - 1e4f64.powf(-0.5) * (1.0 + 1e-4f64).powf(-0.5));
        assert!((v.partial_sums[2].1 - exact).abs() < 1e-3);
    }

    #[test]
    fn zero_and_exponential_integrands() {
        let zero = |_t: f64| Ok(0.0);
        let v = check_integrand(ConditionId::C1, &zero, &SummabilityProtocol::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Summable);
        let exp = |t: f64| Ok((-t).exp());
        let v = check_integrand(ConditionId::L1F, &exp, &SummabilityProtocol::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Summable);
        assert!((v.partial_sums[2].1 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn slow_alpha_harmonic() {
        let p = ConditionProblem::SlowAlpha {
            alpha: Schedule::power(1.0, -1.0),
        };
        let v = check_condition(&p, &SummabilityProtocol::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Divergent);
        assert_eq!(v.condition_id, ConditionId::SlowAlpha);
        assert_eq!("l2_perp".parse::<ConditionId>().unwrap(), ConditionId::L2Perp);
    }
}
