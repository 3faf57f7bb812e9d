use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn hessian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hessian"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn potential(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "potentials", name].iter().collect();
    p.to_str().unwrap().to_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn failing_checks(report: &Value) -> Vec<String> {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap().to_owned())
        .collect()
}

#[test]
fn verify_paper_is_deterministic_and_fails_only_the_separable_quartic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let first = hessian(&["verify-paper", "--json", a.to_str().unwrap()]);
    let second = hessian(&["verify-paper", "--json", b.to_str().unwrap()]);
    assert_eq!(code(&first), 1);
    assert_eq!(code(&second), 1);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(stdout(&first), stdout(&second));

    let report = read_json(&a);
    assert_eq!(failing_checks(&report), ["flatness.quartic_control"]);
    assert!(report["passed"].as_u64().unwrap() > 100);
    assert!(stdout(&first).lines().any(|l| l.contains("FAIL flatness.quartic_control")));
}

#[test]
fn a_wrong_light_cone_sign_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = hessian(&[
        "verify-paper",
        "--cone-potential",
        "0.5*log(t^2 - x^2 - y^2)",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let failing = failing_checks(&read_json(&out));
    for name in ["cone.isometry", "cone.hyperbolic_block", "cone.loop_period"] {
        assert!(failing.iter().any(|f| f == name), "{name} not in {failing:?}");
    }
}

#[test]
fn tightened_tolerances_fail_the_finite_difference_audits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = hessian(&["verify-paper", "--tolerance-scale", "1e-14", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let failing = failing_checks(&read_json(&out));
    assert!(failing.iter().any(|f| f.starts_with("audit.")), "{failing:?}");
}

#[test]
fn analyze_every_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["polar_flat.pot", "quadratic.pot", "hyperbolic2.pot", "lorentz_cone_3d.pot", "orthant.pot", "quartic.pot"] {
        let out = dir.path().join(format!("{name}.json"));
        let o = hessian(&["analyze", &potential(name), "--json", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let r = read_json(&out);
        assert!(!r["points"].as_array().unwrap().is_empty(), "{name}");
        assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["passed"] == true), "{name}");
    }
}

#[test]
fn analyze_seed_changes_samples_but_not_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let f = potential("hyperbolic2.pot");
    assert_eq!(code(&hessian(&["analyze", &f, "--seed", "1", "--json", a.to_str().unwrap()])), 0);
    assert_eq!(code(&hessian(&["analyze", &f, "--seed", "2", "--json", b.to_str().unwrap()])), 0);
    let (a, b) = (read_json(&a), read_json(&b));
    assert_ne!(a["points"], b["points"]);
    assert_eq!(a["verdicts"].as_array().unwrap().len(), b["verdicts"].as_array().unwrap().len());
}

#[test]
fn flatness_and_legendre() {
    let o = hessian(&["flatness", &potential("polar_flat.pot")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(": flat"));
    let o = hessian(&["flatness", &potential("hyperbolic2.pot")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("not flat"));
    let o = hessian(&["legendre", &potential("orthant.pot")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn cheng_yau_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let o = hessian(&["cheng-yau", "--cone", "lorentz", "--resolution", "17", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,u,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 17 * 17);
    for r in rows {
        let cols: Vec<f64> = r.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(cols[3].abs() < 1e-10);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let o = hessian(&["cheng-yau", "--cone", "orthant", "--resolution", "8"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert_eq!(code(&hessian(&["cheng-yau", "--cone", "square"])), 2);
    assert_eq!(code(&hessian(&["no-such-command"])), 2);
    assert_eq!(code(&hessian(&["analyze", "/nonexistent/file.pot"])), 2);
    // window leaves the cone
    let o = hessian(&["cheng-yau", "--cone", "lorentz", "--window", "-1,1,0.5,2"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn potential_file_errors_point_at_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.pot");
    std::fs::write(&f, "variables: x, y\npotential: x^2 + y^2 + * 3\n").unwrap();
    let o = hessian(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("bad.pot:2:") && err.contains("column"), "{err}");

    std::fs::write(&f, "variables: x\npotential: -log(x)\ndomain: x\npoint: -1\n").unwrap();
    assert_eq!(code(&hessian(&["analyze", f.to_str().unwrap()])), 2);
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("linear.pot");
    // every Hessian vanishes, so nothing can be analysed
    std::fs::write(&f, "variables: x, y\npotential: x + y\npoint: 0.5, 0.5\n").unwrap();
    let o = hessian(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}{}", stdout(&o), stderr(&o));

    // F'(log s) = 1/log s is singular inside the integration range
    let o = hessian(&[
        "warp",
        "--base",
        &potential("quadratic.pot"),
        "--warp-expr",
        "exp(t)",
        "--inverse-expr",
        "log(t)",
        "--t-range",
        "0.1,1",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn warp_reports_divergent_and_convergent_integrals() {
    let base = potential("quadratic.pot");
    let o = hessian(&["warp", "--base", &base, "--warp-expr", "t", "--inverse-expr", "t"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("integral diverges"));
    let o = hessian(&["warp", "--base", &base, "--warp-expr", "log(t)", "--inverse-expr", "exp(t)", "--t-range", "0.5,2"]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).contains("diverges"));
}
