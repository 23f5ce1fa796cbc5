use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gbdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbdt")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    gbdt(&args)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn checks(report: &Value) -> Vec<&Value> {
    report["report"]["sections"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["checks"].as_array().unwrap())
        .collect()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn zero_pi_echoes_the_potential() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&config("trivial.json"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rep = report(tmp.path());
    for check in checks(&rep).iter().filter(|c| c["bound"] == "at_most") {
        assert_eq!(check["value"].as_f64(), Some(0.0), "{}", check["name"]);
    }
    let (_, u) = csv(&tmp.path().join("u.csv"));
    let (header, ut) = csv(&tmp.path().join("u_tilde.csv"));
    assert_eq!(header, ["x", "u_tilde_re_0_0", "u_tilde_im_0_0"]);
    assert_eq!(u, ut);
    let (_, psi) = csv(&tmp.path().join("psi_abs.csv"));
    assert!(psi.iter().all(|row| row[2..].iter().all(|&v| v == 0.0)));
}

#[test]
fn soliton_config_passes_and_matches_sech2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&config("soliton.json"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(tmp.path());
    assert_eq!(rep["passed"], true);
    assert!(checks(&rep).iter().any(|c| c["name"].as_str().unwrap().contains("sech²")));

    // ũ = -2κ² sech²(κx + φ) with κ = 1, S₀ = 1.5: φ = -ln(2κS₀ - 1)/2.
    let phi = -0.5 * 2f64.ln();
    let (_, ut) = csv(&tmp.path().join("u_tilde.csv"));
    for row in &ut {
        let expected = -2.0 / (row[0] + phi).cosh().powi(2);
        assert!((row[1] - expected).abs() <= 1e-8, "x = {}", row[0]);
        assert_eq!(row[2], 0.0);
    }
    let (header, psi) = csv(&tmp.path().join("psi.csv"));
    assert_eq!(header, ["x", "t", "psi_re_0_0", "psi_im_0_0"]);
    assert_eq!(psi.len(), 3 * ut.len());
}

#[test]
fn discrete_scalar_eigen_residuals() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&config("discrete-scalar.json"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv(&tmp.path().join("eigen_residuals.csv"));
    assert_eq!(header, ["k", "residual", "truncated_row"]);
    assert_eq!(rows.len(), 40);
    for row in rows.iter().filter(|r| r[2] == 0.0) {
        assert!(row[1] <= 1e-10, "k = {}: {}", row[0], row[1]);
    }
    for table in ["c_tilde", "q_tilde", "a_tilde", "b_tilde", "y", "psi"] {
        assert!(tmp.path().join(format!("{table}.csv")).exists(), "{table}");
    }
    let (_, c_tilde) = csv(&tmp.path().join("c_tilde.csv"));
    assert_eq!(c_tilde.len(), 41);
    assert!(c_tilde.iter().all(|row| row[1] >= 1.0));
}

#[test]
fn asymptotics_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&config("oscillator.json"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(tmp.path().join("exponents.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "direction,tau,r,source");
    assert!(lines[1].starts_with("+,1.0000000000000000e0,0,"));
    assert!(lines[2].starts_with("-,1.0000000000000000e0,0,"));
    let fits = std::fs::read_to_string(tmp.path().join("fits.csv")).unwrap();
    assert_eq!(fits.lines().count(), 1 + 2 * 5);
}

#[test]
fn boundary_violation_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"mode": "discrete", "triple": {"kind": "explicit", "a": [[2]], "s0": [[1]], "pi0": [[1, 0]]},
            "jacobi": {"kind": "free", "truncation": 10}}"#,
    )
    .unwrap();
    let out = run(&path, &tmp.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[I 0]Π₀* = 0 violated"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn broken_identity_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"mode": "continuous", "triple": {"kind": "explicit", "a": [[[0, 1]]], "s0": [[1]], "pi0": [[0, 0]]}}"#,
    )
    .unwrap();
    let out = run(&path, &tmp.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("generating identity"));
}

#[test]
fn malformed_json_and_missing_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, r#"{"mode": "continuous", "triple": "#).unwrap();
    assert_eq!(run(&path, tmp.path(), &[]).status.code(), Some(2));
    let missing = tmp.path().join("missing.json");
    assert_eq!(run(&missing, tmp.path(), &[]).status.code(), Some(4));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = run(&config("discrete-scalar.json"), &blocker.join("out"), &[]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn failing_checks_exit_with_three() {
    // A coarse grid cannot meet the central-difference tolerance.
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("coarse.json");
    std::fs::write(
        &path,
        r#"{"mode": "continuous", "triple": {"kind": "soliton", "kappa": 2, "s0": 1},
            "grid": {"length": 4, "step": 0.1}}"#,
    )
    .unwrap();
    let out = run(&path, &tmp.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(&tmp.path().join("out"));
    assert_eq!(rep["passed"], false);
    let text = std::fs::read_to_string(tmp.path().join("out/report.txt")).unwrap();
    assert!(text.contains("FAIL  central differences"));
}

#[test]
fn tol_scale_and_seed_overrides_are_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &config("discrete-random.json"),
        tmp.path(),
        &["--seed", "11", "--tol-scale", "10"],
    );
    assert_eq!(out.status.code(), Some(0));
    let rep = report(tmp.path());
    assert_eq!(rep["config"]["seed"], 11);
    assert_eq!(rep["config"]["tol_scale"], 10.0);
    assert_eq!(rep["config"]["method"], Value::Null);
    let limits: Vec<f64> = checks(&rep)
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("rows 1..N-1"))
        .map(|c| c["limit"].as_f64().unwrap())
        .collect();
    assert_eq!(limits, [1e-8]);
}

#[test]
fn seeds_change_random_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&config("discrete-random.json"), &a, &["--seed", "1"]);
    run(&config("discrete-random.json"), &b, &["--seed", "2"]);
    assert_ne!(
        std::fs::read(a.join("y.csv")).unwrap(),
        std::fs::read(b.join("y.csv")).unwrap()
    );
}

#[test]
fn verify_rejects_tol_scale() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&config("verify.json"), tmp.path(), &["--tol-scale", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
