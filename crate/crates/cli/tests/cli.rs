use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn monoflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monoflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn reproduce_prints_summary_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = monoflow(&[
        "reproduce",
        "two_d",
        "--param",
        "T=50",
        "--out",
        out_dir.to_str().unwrap(),
        "--svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"scenario\": \"two_d\""));
    for name in ["two_d_trajectory.csv", "two_d_summary.json", "two_d_states.svg"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
}

#[test]
fn simulate_without_svg_flag_writes_no_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tik.toml",
        "schema_version = 1\nscenario = \"tikhonov\"\n[parameters]\nT = 20.0\n",
    );
    let out_dir = dir.path().join("out");
    let out = monoflow(&["simulate", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().any(|n| n.ends_with(".csv")));
    assert!(!names.iter().any(|n| n.ends_with(".svg")));
}

#[test]
fn omega_prints_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "omega.toml",
        "schema_version = 1\nscenario = \"two_d\"\n[omega]\npsi = \"planar_barrier\"\nphi = \"planar_objective\"\n\
         epsilons = [0.1, 0.01]\ndual = true\n",
    );
    let out = monoflow(&["omega", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,primal,dual,gap,slope");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[1] + 0.02).abs() < 1e-8);
    assert!((row[4] + 0.2).abs() < 1e-7);
}

#[test]
fn check_conditions_lists_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "q.toml", "schema_version = 1\nscenario = \"quasi_autonomous\"\n");
    let out = monoflow(&["check-conditions", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("L1_F") && stdout.contains("L2_perp"), "{stdout}");
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "schema_version = 1\nscenario = \"two_d\"\n[parameters]\nwhat = 1\n");
    assert_eq!(monoflow(&["simulate", &bad]).status.code(), Some(2));
    assert_eq!(monoflow(&["reproduce", "nonsense"]).status.code(), Some(2));
    let out = monoflow(&["reproduce", "two_d", "--param", "b=5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn io_errors_exit_with_code_four() {
    let out = monoflow(&["simulate", "/nonexistent/dir/config.toml"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn schema_documents_every_scenario() {
    let out = monoflow(&["schema"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for sc in ["two_d", "pde_neumann", "tikhonov", "sweeping", "quasi_autonomous", "rotation_ergodic", "custom"] {
        assert!(stdout.contains(sc), "{sc}");
    }
}
