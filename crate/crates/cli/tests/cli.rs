use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use superwav_cli::run_command;

const HAAR: &str = r#"{"scale": 2, "kind": "trig", "name": "haar", "trig": {"k_min": 0, "coeffs": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}}"#;
const STRETCHED: &str = r#"{"scale": 2, "kind": "trig", "trig": {"k_min": 0, "coeffs": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}}"#;

struct Work {
    dir: tempfile::TempDir,
}

impl Work {
    fn new() -> Self {
        Work {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    /// Run with `--no-timestamp`, returning the exit code and parsed report.
    fn run(&self, args: &[&str]) -> (i32, Value) {
        let report = self.path("report.json");
        let mut full = vec![
            "superwav",
            "--no-timestamp",
            "--report",
            report.to_str().unwrap(),
        ];
        full.extend_from_slice(args);
        let code = run_command(full);
        let text = std::fs::read_to_string(&report).unwrap();
        (code, serde_json::from_str(&text).unwrap())
    }
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["check"] == name)
        .unwrap_or_else(|| panic!("no verdict {name} in {report:#}"))
}

#[test]
fn haar_verdict_is_orthogonal() {
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let (code, r) = w.run(&["verdict", &spec]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["class"], "ORTHOGONAL");
    assert_eq!(r["cycles"], serde_json::json!([["0/1"]]));
    assert_eq!(r["status"], "pass");
}

#[test]
fn trivial_cycle_alone_is_a_tight_frame_only() {
    let w = Work::new();
    let spec = w.file("sh.json", STRETCHED);
    let (code, r) = w.run(&["verdict", &spec, "--cycles", "0"]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["details"]["class"], "TIGHT_FRAME_ONLY");
    assert_eq!(r["details"]["missing"], serde_json::json!([["1/3", "2/3"]]));
    let (code, _) = w.run(&["verdict", &spec]);
    assert_eq!(code, 0);
}

#[test]
fn lawton_reports_both_multiplicity_routes() {
    let w = Work::new();
    let spec = w.file("sh.json", STRETCHED);
    let (code, r) = w.run(&["lawton", &spec]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["spectrum"]["multiplicity_by_eigenvalues"], 2);
    assert_eq!(r["details"]["spectrum"]["multiplicity_by_rank"], 2);
    assert!(check(&r, "unit-eigenvalues-are-cycle-roots")["passed"]
        .as_bool()
        .unwrap());
}

#[test]
fn construct_then_verify_scaling_equation() {
    let w = Work::new();
    let out = w.path("c/spec.json");
    let (code, r) = w.run(&[
        "construct",
        "cycles-char",
        "--cycles",
        "1/7,2/7,4/7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{r:#}");
    assert!(w.path("c/spec.arcs.json").exists());
    let (code, r) = w.run(&[
        "verify",
        out.to_str().unwrap(),
        "--what",
        "scaling-eq",
        "--max-period",
        "8",
    ]);
    assert_eq!(code, 0, "{r:#}");
    assert!(check(&r, "cycle-coverage")["passed"].as_bool().unwrap());
    assert_eq!(
        r["details"]["phi_hat"][0],
        serde_json::json!([["-2/7", "1/14"]])
    );
}

#[test]
fn overlapping_arcs_are_an_input_error() {
    let w = Work::new();
    let spec = w.file(
        "bad.json",
        r#"{"scale": 2, "kind": "char", "char": {"arcs": [{"lo": [0, 1], "hi": [1, 2]}, {"lo": [1, 4], "hi": [3, 4]}]}}"#,
    );
    let (code, r) = w.run(&["qmf", &spec]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "error");
    assert_eq!(r["error"]["kind"], "input");
}

#[test]
fn unknown_fields_fail_unless_lenient() {
    let w = Work::new();
    let spec = w.file(
        "x.json",
        &HAAR.replace("\"name\"", "\"colour\": 3, \"name\""),
    );
    let (code, r) = w.run(&["qmf", &spec]);
    assert_eq!((code, r["error"]["kind"].as_str()), (2, Some("schema")));
    let (code, r) = w.run(&["--lenient", "qmf", &spec]);
    assert_eq!(code, 0);
    assert_eq!(r["warnings"][0], "ignored unknown field $.colour");
}

#[test]
fn reports_are_deterministic_without_timestamp() {
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let out = w.path("o");
    let args = ["wavelet", spec.as_str(), "--out", out.to_str().unwrap()];
    let (_, a) = w.run(&args);
    let first = std::fs::read(out.join("psi1_c0_p0.csv")).unwrap();
    let (_, b) = w.run(&args);
    assert_eq!(a, b);
    assert!(a.get("timestamp_unix").is_none());
    assert_eq!(first, std::fs::read(out.join("psi1_c0_p0.csv")).unwrap());
}

#[test]
fn haar_wavelet_csv() {
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let out = w.path("o");
    let (code, r) = w.run(&["wavelet", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{r:#}");
    let text = std::fs::read_to_string(out.join("psi1_c0_p0.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "lo,hi,re,im");
    assert_eq!(rows.len(), 3);
    let sign = |row: &str| {
        row.split(',')
            .nth(2)
            .unwrap()
            .parse::<f64>()
            .unwrap()
            .signum()
    };
    assert_eq!(sign(rows[1]), -sign(rows[2]));
    assert!(check(&r, "wavelets-orthogonal-to-V0")["passed"]
        .as_bool()
        .unwrap());
}

#[test]
fn frame_check_on_trivial_cycle_only() {
    let w = Work::new();
    let spec = w.file("sh.json", STRETCHED);
    let (code, r) = w.run(&[
        "verify",
        &spec,
        "--what",
        "frame",
        "--cycles",
        "0",
        "--m-range",
        "-8..2",
        "--n-range",
        "-48..48",
    ]);
    assert_eq!(code, 0, "{r:#}");
    let ratio = r["details"]["frame_ratio"].as_f64().unwrap();
    assert!((0.95..=1.0 + 1e-6).contains(&ratio));
    let off = r["details"]["translate_gram"]["max_off_diagonal"]
        .as_f64()
        .unwrap();
    assert!((off - 2.0 / 9.0).abs() <= 1e-9);
}

#[test]
fn product_method_for_characteristic_filters() {
    let w = Work::new();
    let out = w.path("c.json");
    w.run(&[
        "construct",
        "cycles-char",
        "--cycles",
        "1/3,2/3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let dir = w.path("p");
    let (code, r) = w.run(&[
        "scaling",
        out.to_str().unwrap(),
        "--method",
        "product",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{r:#}");
    assert!(dir.join("phi_hat_c0_p1.csv").exists());
    assert!(check(&r, "partition-of-unity")["passed"].as_bool().unwrap());
}

#[test]
fn stretch_round_trips_through_the_spec() {
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let out = w.path("s.json");
    let (code, r) = w.run(&["stretch", &spec, "--p", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{r:#}");
    let (code, r) = w.run(&["verdict", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["cycles"].as_array().unwrap().len(), 2);
    let (code, _) = w.run(&["stretch", &spec, "--p", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn hat_start_cascade_stays_compact() {
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let out = w.path("h");
    let (code, r) = w.run(&[
        "scaling",
        &spec,
        "--start",
        "hat",
        "--iterations",
        "25",
        "--hat-levels",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    // Twenty-five steps leave an error of order 1e-4, above the stop tolerance.
    assert_eq!(code, 1);
    assert_eq!(r["details"]["cascade_iterations"], 25);
    let rows = std::fs::read_to_string(out.join("phi_c0_p0.csv"))
        .unwrap()
        .lines()
        .count();
    assert!(rows < 64, "{rows}");
}

#[test]
fn malformed_arguments_exit_with_two() {
    assert_eq!(run_command(["superwav", "verify", "x.json"]), 2);
    assert_eq!(run_command(["superwav", "--help"]), 0);
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let (code, r) = w.run(&["verify", &spec, "--what", "frame", "--m-range", "3..1"]);
    assert_eq!((code, r["error"]["kind"].as_str()), (2, Some("usage")));
}

fn binary() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_superwav"))
}

#[test]
fn binary_writes_report_to_stdout_and_honours_thread_cap() {
    let w = Work::new();
    let spec = w.file("haar.json", HAAR);
    let out = Command::new(binary())
        .env("SUPERWAV_THREADS", "1")
        .args(["qmf", &spec])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["command"], "qmf");
    assert!(r["timestamp_unix"].is_u64());
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let bad = Command::new(binary())
        .env("SUPERWAV_THREADS", "zero")
        .args(["qmf", &spec])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
