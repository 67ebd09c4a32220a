//! Reproduction scenarios, configuration, batch runs and output emission.

pub mod config;
pub mod output;
pub mod pde;
pub mod scenarios;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{ConditionVerdict, SummabilityProtocol};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::integrator::Trajectory;
use crate::operator_core::catalog;
use crate::viscosity_omega::{omega_dual, omega_primal, OmegaOptions};

pub use config::{ExperimentConfig, OmegaConfig, OutputConfig, Param, Scenario, SCHEMA_VERSION};
pub use output::{emit_outputs, write_csv};
pub use scenarios::{
    run_custom, run_pde_neumann, run_quasi_autonomous, run_rotation_ergodic, run_sweeping,
    run_tikhonov, run_two_d, scenario_conditions,
};

/// Tolerance attached to the `h` vs `h/2` final-state delta.
pub const REFINEMENT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct RefinementDelta {
    pub quantity: String,
    pub delta: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

impl RefinementDelta {
    pub fn new(quantity: &str, delta: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            delta,
            tolerance: REFINEMENT_TOL,
            within_tolerance: delta < REFINEMENT_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub seed: u64,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    /// Description of the set the trajectory is measured against.
    pub target: String,
    pub final_distance_to_target: Option<f64>,
    pub condition_verdicts: Vec<ConditionVerdict>,
    pub energy_final: Option<f64>,
    /// `Σ h ‖Δx/h‖²`.
    pub kinetic_energy: f64,
    pub convergence: String,
    pub grid_refinement_deltas: Option<Vec<RefinementDelta>>,
    pub metrics: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    pub notes: Vec<String>,
    pub steps: usize,
    pub recorded_nodes: usize,
    pub max_residual: f64,
    pub valid: bool,
    /// Seconds.
    pub wallclock: f64,
}

impl RunSummary {
    pub(crate) fn new(cfg: &ExperimentConfig, traj: &Trajectory) -> Self {
        Self {
            scenario: cfg.scenario,
            seed: cfg.seed,
            final_time: traj.final_time(),
            final_state: traj.final_state().iter().copied().collect(),
            target: String::new(),
            final_distance_to_target: None,
            condition_verdicts: Vec::new(),
            energy_final: None,
            kinetic_energy: traj.kinetic_energy,
            convergence: String::new(),
            grid_refinement_deltas: None,
            metrics: BTreeMap::new(),
            labels: BTreeMap::new(),
            notes: vec![
                "inf-compactness of the penalty levels holds automatically in finite dimension; not checked".into(),
            ],
            steps: traj.metadata.steps,
            recorded_nodes: traj.len(),
            max_residual: traj.max_residual(),
            valid: traj.is_valid(),
            wallclock: 0.0,
        }
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn verdict(&self, id: crate::diagnostics::ConditionId) -> Option<&ConditionVerdict> {
        self.condition_verdicts.iter().find(|v| v.condition_id == id)
    }

    pub fn refinement_delta(&self) -> Option<f64> {
        self.grid_refinement_deltas
            .as_ref()
            .and_then(|d| d.first())
            .map(|d| d.delta)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// A finished run: its summary and the recorded trajectory with the traces
/// written to the CSV.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
    /// Distance to the target set per recorded node.
    pub distance: Option<Vec<f64>>,
    /// Energy per recorded node.
    pub energy: Option<Vec<f64>>,
}

/// Validates the configuration and runs its scenario.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let mut out = match cfg.scenario {
        Scenario::TwoD => run_two_d(cfg),
        Scenario::PdeNeumann => run_pde_neumann(cfg),
        Scenario::Tikhonov => run_tikhonov(cfg),
        Scenario::Sweeping => run_sweeping(cfg),
        Scenario::QuasiAutonomous => run_quasi_autonomous(cfg),
        Scenario::RotationErgodic => run_rotation_ergodic(cfg),
        Scenario::Custom => run_custom(cfg),
    }?;
    out.summary.wallclock = start.elapsed().as_secs_f64();
    log::info!(
        "{}: {} steps in {:.2}s, final distance {:?}",
        cfg.scenario,
        out.summary.steps,
        out.summary.wallclock,
        out.summary.final_distance_to_target
    );
    Ok(out)
}

/// Runs independent configurations in parallel, each sequentially.
pub fn run_batch(configs: &[ExperimentConfig]) -> Vec<Result<RunOutput>> {
    configs.par_iter().map(run).collect()
}

/// Condition verdicts for the scenario without running its flow.
pub fn check_conditions(cfg: &ExperimentConfig) -> Result<Vec<ConditionVerdict>> {
    cfg.validate()?;
    let protocol = SummabilityProtocol::default();
    scenario_conditions(cfg)?
        .par_iter()
        .map(|p| crate::diagnostics::check_condition(p, &protocol))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaRow {
    pub epsilon: f64,
    pub primal: Option<f64>,
    pub dual: Option<f64>,
    pub gap: Option<f64>,
    pub iterations: usize,
}

/// `ω(ε)` for the catalog pair named in the `[omega]` table.
pub fn omega_table(cfg: &OmegaConfig) -> Result<Vec<OmegaRow>> {
    let psi = catalog::function(&cfg.psi, cfg.n, &cfg.params)?;
    let phi = catalog::function(&cfg.phi, cfg.n, &cfg.params)?;
    let opts = OmegaOptions::default();
    cfg.epsilons
        .par_iter()
        .map(|&e| {
            let r = if cfg.dual {
                omega_dual(psi.as_ref(), phi.as_ref(), e, None, &opts)?
            } else {
                omega_primal(psi.as_ref(), phi.as_ref(), e, None, &opts)?
            };
            Ok(OmegaRow {
                epsilon: e,
                primal: r.primal_value.finite(),
                dual: r.dual_value.and_then(ExtReal::finite),
                gap: r.gap,
                iterations: r.iterations,
            })
        })
        .collect()
}
