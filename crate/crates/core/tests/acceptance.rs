//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any
//! criterion that is expected to hold fails.
//!
//! Criterion 4(d) asks the separable quartic `x^4 + y^4` to come out
//! non-flat. Its Hessian is diagonal with each entry depending on one
//! variable, so it is flat and the line is expected to read FAIL; it is
//! printed but not counted. `x^4 + y^4 + xy` is the working non-flat control.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hessian_core::report::{run_criteria, Check, SuiteConfig};

struct Line {
    label: &'static str,
    passed: bool,
    detail: String,
    counted: bool,
}

impl Line {
    fn print(&self) {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let note = if self.counted { "" } else { " [expected to fail, not counted]" };
        println!("criterion {:<6} {status} {}{note}", self.label, self.detail);
    }
}

/// All checks must pass; the detail names the count and any failures.
fn summarize(checks: &[&Check], elapsed: Option<(Duration, f64)>) -> (bool, String) {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.verdict.passed).map(|c| c.verdict.name.as_str()).collect();
    let mut passed = !checks.is_empty() && failed.is_empty();
    let mut detail = format!("{}/{} checks", checks.len() - failed.len(), checks.len());
    if !failed.is_empty() {
        detail += &format!(", failing: {}", failed.join(", "));
    }
    if let Some((t, limit)) = elapsed {
        let secs = t.as_secs_f64();
        passed &= secs < limit;
        detail += &format!(", {secs:.2} s (< {limit} s)");
    }
    (passed, detail)
}

fn timed(config: &SuiteConfig, c: u8) -> (Vec<Check>, Duration) {
    let start = Instant::now();
    let report = run_criteria(config, &[c]);
    (report.checks, start.elapsed())
}

fn verify_paper_json(path: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_hessian"))
        .args(["verify-paper", "--json"])
        .arg(path)
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    assert!(status.code().is_some());
    std::fs::read(path).expect("report written")
}

fn main() -> ExitCode {
    let config = SuiteConfig::default();
    let limits = [(1, Some(1.0)), (2, None), (3, Some(30.0)), (4, None), (5, None), (6, Some(60.0)), (7, None), (8, None)];
    let mut lines = Vec::new();
    for (c, limit) in limits {
        let (checks, elapsed) = timed(&config, c);
        let refs: Vec<&Check> = checks.iter().collect();
        let timing = limit.map(|l| (elapsed, l));
        if c == 4 {
            let quartic = "flatness.quartic_control";
            let (rest, control): (Vec<&Check>, Vec<&Check>) = refs.iter().partition(|k| k.verdict.name != quartic);
            let (passed, detail) = summarize(&rest, timing);
            lines.push(Line { label: "4(a-c)", passed, detail, counted: true });
            let (passed, _) = summarize(&control, None);
            let detail = match control.first() {
                Some(k) => format!("x^4 + y^4: {}", k.verdict.line()),
                None => "x^4 + y^4: check missing".into(),
            };
            lines.push(Line { label: "4(d)", passed, detail, counted: false });
            continue;
        }
        let label = ["", "1", "2", "3", "4", "5", "6", "7", "8"][c as usize];
        let (passed, detail) = summarize(&refs, timing);
        lines.push(Line { label, passed, detail, counted: true });
    }

    let dir = tempfile::tempdir().expect("temp dir");
    let a = verify_paper_json(&dir.path().join("a.json"));
    let b = verify_paper_json(&dir.path().join("b.json"));
    lines.push(Line {
        label: "9",
        passed: !a.is_empty() && a == b,
        detail: format!("verify-paper JSON identical across two runs ({} bytes)", a.len()),
        counted: true,
    });

    for l in &lines {
        l.print();
    }
    let failures = lines.iter().filter(|l| l.counted && !l.passed).count();
    println!("acceptance: {} counted criteria, {failures} failed", lines.iter().filter(|l| l.counted).count());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
