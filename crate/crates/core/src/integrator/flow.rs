use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::Vector;
use crate::operator_core::operators::{InnerSolver, ScaledOperator, ShiftedOperator};
use crate::operator_core::{OperatorRef, SetRef, WeightedSum};
use crate::operator_core::sets::Translated;

use super::schedules::{Schedule, VectorPath};

/// One summand `w(t) · M` of a time-dependent operator.
#[derive(Debug, Clone)]
pub struct FlowTerm {
    pub operator: OperatorRef,
    pub weight: Schedule,
    /// Label used in schedule errors and descriptors (`beta`, `epsilon`, ...).
    pub weight_name: String,
    /// Evaluated by a forward step in forward–backward mode.
    pub explicit: bool,
}

/// `ẋ + Σ_i w_i(t) M_i x ∋ f(t)`.
///
/// Covers the autonomous, multiscale (`A + β(t)B`), Tikhonov
/// (`∂Φ + ε(t)I`) and quasi-autonomous (`∂Φ − f(t)`) flows.
#[derive(Debug, Clone)]
pub struct Flow {
    pub name: String,
    pub terms: Vec<FlowTerm>,
    pub forcing: Option<VectorPath>,
}

impl Flow {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            terms: Vec::new(),
            forcing: None,
        }
    }

    /// Autonomous flow `ẋ + M x ∋ 0`.
    pub fn autonomous(operator: OperatorRef) -> Self {
        let name = format!("x' + {} x = 0", operator.name());
        Self::new(name).with_term(operator, Schedule::constant(1.0), "weight")
    }

    pub fn with_term(mut self, operator: OperatorRef, weight: Schedule, weight_name: &str) -> Self {
        self.terms.push(FlowTerm {
            operator,
            weight,
            weight_name: weight_name.to_string(),
            explicit: false,
        });
        self
    }

    /// A single-valued cocoercive summand, stepped explicitly in
    /// forward–backward mode.
    pub fn with_explicit_term(mut self, operator: OperatorRef, weight: Schedule, weight_name: &str) -> Self {
        self.terms.push(FlowTerm {
            operator,
            weight,
            weight_name: weight_name.to_string(),
            explicit: true,
        });
        self
    }

    pub fn with_forcing(mut self, forcing: VectorPath) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map(|t| t.operator.dim()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.terms.is_empty() {
            return Err(Error::InvalidParameter(format!("flow `{}` has no terms", self.name)));
        }
        for term in &self.terms {
            if term.operator.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: term.operator.dim(),
                });
            }
        }
        if let Some(f) = &self.forcing {
            if f.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
            }
        }
        Ok(())
    }

    /// Positivity of every weight schedule on the grid nodes.
    pub fn check_schedules(&self, nodes: &[f64]) -> Result<()> {
        for term in &self.terms {
            term.weight.check_positive(&term.weight_name, nodes)?;
        }
        Ok(())
    }

    pub fn schedule_descriptors(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{} = {}", t.weight_name, t.weight.describe()))
            .collect();
        if let Some(f) = &self.forcing {
            out.push(format!("forcing decay = {}", f.decay.describe()));
        }
        out
    }

    /// `A_t = Σ w_i(t) M_i − f(t)` as an operator.
    pub fn operator_at(&self, t: f64) -> Result<OperatorRef> {
        self.operator_at_with(t, InnerSolver::default())
    }

    pub fn operator_at_with(&self, t: f64, solver: InnerSolver) -> Result<OperatorRef> {
        let all: Vec<&FlowTerm> = self.terms.iter().collect();
        let base = combine(&all, t, solver)?.ok_or_else(|| {
            Error::InvalidParameter(format!("flow `{}` has no terms", self.name))
        })?;
        self.apply_forcing(base, t)
    }

    /// Implicit part of `A_t` in forward–backward mode, without forcing.
    pub(crate) fn implicit_part(&self, t: f64, solver: InnerSolver) -> Result<Option<OperatorRef>> {
        let implicit: Vec<&FlowTerm> = self.terms.iter().filter(|t| !t.explicit).collect();
        combine(&implicit, t, solver)
    }

    pub(crate) fn apply_forcing(&self, base: OperatorRef, t: f64) -> Result<OperatorRef> {
        match &self.forcing {
            Some(f) => Ok(Arc::new(ShiftedOperator::new(base, -f.value(t))?)),
            None => Ok(base),
        }
    }

    /// `φ_t(x) = Σ w_i(t) f_i(x) − ⟨f(t), x⟩` when every summand has a potential.
    pub fn energy(&self, t: f64, x: &Vector) -> Option<ExtReal> {
        let mut total = ExtReal::ZERO;
        for term in &self.terms {
            let f = term.operator.potential()?;
            total = total + f.value(x).scale(term.weight.value(t));
        }
        if let Some(forcing) = &self.forcing {
            total = total + (-forcing.value(t).dot(x));
        }
        Some(total)
    }

    pub fn has_energy(&self) -> bool {
        self.terms.iter().all(|t| t.operator.potential().is_some())
    }
}

fn weighted(term: &FlowTerm, t: f64) -> Result<OperatorRef> {
    let w = term.weight.value(t);
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::NonPositiveSchedule {
            name: term.weight_name.clone(),
            t,
        });
    }
    if w == 1.0 {
        Ok(term.operator.clone())
    } else {
        Ok(Arc::new(ScaledOperator::new(term.operator.clone(), w)?))
    }
}

fn combine(terms: &[&FlowTerm], t: f64, solver: InnerSolver) -> Result<Option<OperatorRef>> {
    let mut iter = terms.iter();
    let Some(first) = iter.next() else {
        return Ok(None);
    };
    let Some(second) = iter.next() else {
        return weighted(first, t).map(Some);
    };
    let w = |term: &FlowTerm| {
        let v = term.weight.value(t);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonPositiveSchedule {
                name: term.weight_name.clone(),
                t,
            })
        }
    };
    let mut acc: OperatorRef = Arc::new(WeightedSum::new_quiet(
        first.operator.clone(),
        second.operator.clone(),
        (w(first)?, w(second)?),
    )?
    .with_solver(solver));
    for term in iter {
        acc = Arc::new(
            WeightedSum::new_quiet(acc, term.operator.clone(), (1.0, w(term)?))?.with_solver(solver),
        );
    }
    Ok(Some(acc))
}

/// A set-valued path `t ↦ C(t)` with a projection oracle at every time.
pub trait MovingSet: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn name(&self) -> String;

    fn at(&self, t: f64) -> SetRef;
}

/// `C(t) = C + c(t)`.
#[derive(Debug, Clone)]
pub struct TranslatingSet {
    pub base: SetRef,
    pub drift: VectorPath,
}

impl TranslatingSet {
    pub fn new(base: SetRef, drift: VectorPath) -> Result<Self> {
        if base.dim() != drift.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: drift.dim(),
            });
        }
        Ok(Self { base, drift })
    }
}

impl MovingSet for TranslatingSet {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn name(&self) -> String {
        format!("{} + c(t), c decay {}", self.base.name(), self.drift.decay.describe())
    }

    fn at(&self, t: f64) -> SetRef {
        Arc::new(Translated::new(self.base.clone(), self.drift.value(t)))
    }
}

/// A set that does not move.
#[derive(Debug, Clone)]
pub struct StaticSet(pub SetRef);

impl MovingSet for StaticSet {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn name(&self) -> String {
        self.0.name()
    }

    fn at(&self, _t: f64) -> SetRef {
        self.0.clone()
    }
}
