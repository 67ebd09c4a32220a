use monoflow::diagnostics::ConditionId;
use monoflow::experiments::{
    self, emit_outputs, run_batch, write_csv, ExperimentConfig, OmegaConfig, Param, Scenario, REFINEMENT_TOL,
};
use monoflow::Error;

fn quick(scenario: Scenario) -> ExperimentConfig {
    let cfg = ExperimentConfig::for_scenario(scenario);
    match scenario {
        Scenario::TwoD | Scenario::Tikhonov | Scenario::QuasiAutonomous => cfg.with_param("T", Param::Number(50.0)),
        Scenario::RotationErgodic => cfg.with_param("T", Param::Number(5.0)).with_param("h", Param::Number(1e-3)),
        Scenario::PdeNeumann => cfg.with_param("T", Param::Number(10.0)),
        Scenario::Sweeping | Scenario::Custom => cfg,
    }
}

#[test]
fn every_scenario_runs_with_defaults_shortened() {
    let configs: Vec<ExperimentConfig> = Scenario::ALL.into_iter().map(quick).collect();
    for (cfg, out) in configs.iter().zip(run_batch(&configs)) {
        let out = out.unwrap_or_else(|e| panic!("{}: {e}", cfg.scenario));
        assert_eq!(out.summary.scenario, cfg.scenario);
        assert!(out.summary.valid, "{}", cfg.scenario);
    }
}

#[test]
fn toml_round_trip() {
    for sc in Scenario::ALL {
        let mut cfg = quick(sc);
        cfg.seed = 42;
        cfg.outputs.svg = true;
        let text = cfg.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back, "{text}");
    }
}

#[test]
fn omega_table_round_trips_and_evaluates() {
    let mut cfg = ExperimentConfig::for_scenario(Scenario::TwoD);
    cfg.omega = Some(OmegaConfig {
        psi: "planar_barrier".into(),
        phi: "planar_objective".into(),
        n: 2,
        epsilons: vec![0.1, 0.01],
        params: Default::default(),
        dual: true,
    });
    let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
    let rows = experiments::omega_table(back.omega.as_ref().unwrap()).unwrap();
    for row in rows {
        assert!((row.primal.unwrap() + 2.0 * row.epsilon * row.epsilon).abs() < 1e-8);
        assert!(row.gap.unwrap() < 1e-6);
    }
}

#[test]
fn unknown_keys_and_bad_ranges_are_config_errors() {
    let cfg = quick(Scenario::TwoD).with_param("bogus", Param::Number(1.0));
    assert!(matches!(experiments::run(&cfg), Err(Error::Config(_))));
    let cfg = quick(Scenario::TwoD).with_param("b", Param::Number(3.0));
    let err = experiments::run(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
    assert!(ExperimentConfig::from_toml_str("schema_version = 1\nscenario = \"nope\"").is_err());
}

#[test]
fn csv_has_one_row_per_recorded_node() {
    let out = experiments::run(&quick(Scenario::TwoD)).unwrap();
    let csv = write_csv(&out);
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,x_1,x_2,residual"));
    let width = header.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), out.summary.recorded_nodes);
    assert_eq!(rows.len(), out.trajectory.len());
    assert!(rows.iter().all(|r| r.split(',').count() == width));
}

#[test]
fn runs_are_deterministic() {
    let cfg = quick(Scenario::TwoD);
    let a = write_csv(&experiments::run(&cfg).unwrap());
    let b = write_csv(&experiments::run(&cfg).unwrap());
    assert_eq!(a, b);
}

#[test]
fn svg_written_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(Scenario::Tikhonov);
    let out = experiments::run(&cfg).unwrap();
    let written = emit_outputs(&out, &cfg.outputs, dir.path()).unwrap();
    assert!(written.iter().all(|p| p.extension().unwrap() != "svg"));
    assert!(dir.path().join("tikhonov_trajectory.csv").exists());
    assert!(dir.path().join("tikhonov_summary.json").exists());

    cfg.outputs.svg = true;
    let written = emit_outputs(&out, &cfg.outputs, dir.path()).unwrap();
    let svgs: Vec<_> = written.iter().filter(|p| p.extension().unwrap() == "svg").collect();
    assert!(!svgs.is_empty());
    for p in svgs {
        assert!(std::fs::read_to_string(p).unwrap().starts_with("<svg"));
    }
}

#[test]
fn summary_contains_every_requested_verdict() {
    let mut cfg = quick(Scenario::Tikhonov);
    cfg.outputs.conditions = Some(vec!["slow_eps".into(), "C6".into()]);
    let out = experiments::run(&cfg).unwrap();
    assert!(out.summary.verdict(ConditionId::SlowEps).is_some());
    assert!(out.summary.verdict(ConditionId::C6).is_some());
    let json: serde_json::Value = serde_json::from_str(&out.summary.to_json().unwrap()).unwrap();
    assert_eq!(json["condition_verdicts"].as_array().unwrap().len(), 2);

    cfg.outputs.conditions = Some(vec!["C1".into()]);
    assert!(matches!(experiments::run(&cfg), Err(Error::Config(_))));
}

#[test]
fn halved_step_changes_final_state_little() {
    let cfg = quick(Scenario::TwoD).with_param("refine", Param::Number(1.0));
    let out = experiments::run(&cfg).unwrap();
    let deltas = out.summary.grid_refinement_deltas.as_ref().unwrap();
    assert!(!deltas.is_empty());
    for d in deltas {
        assert_eq!(d.tolerance, REFINEMENT_TOL);
        assert!(d.within_tolerance, "{d:?}");
    }
}

#[test]
fn nonzero_mean_forcing_needs_opt_in() {
    let n = 8;
    let h: Vec<f64> = (0..n).map(|k| 1.0 + k as f64).collect();
    let cfg = quick(Scenario::PdeNeumann)
        .with_param("N", Param::Number(n as f64))
        .with_param("h_values", Param::List(h));
    let err = experiments::run(&cfg).unwrap_err();
    assert!(matches!(err, Error::NonZeroMeanForcing { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
    let out = experiments::run(&cfg.with_param("demean", Param::Number(1.0))).unwrap();
    assert!(out.summary.notes.iter().any(|n| n.contains("mean")));
}
