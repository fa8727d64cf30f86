use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use busemann::analysis::rates::{rho, RateInputs};
use busemann::experiments::{self, Mixture, Model};
use busemann::StepSchedule;
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_busemann"));
    c.env("SB_THREADS", "2");
    c
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_manifest(dir: &Path, name: &str, manifest: &Value) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(manifest).unwrap()).unwrap();
    path
}

fn minimal(dir: &Path, iterations: usize) -> Value {
    json!({
        "name": "minimal",
        "run_config": {
            "space": {"kind": "euclidean", "dim": 2},
            "C": {"kind": "ball", "center": {"space": "euclidean", "coords": [0, 0]}, "radius": 1},
            "objective": {"atoms": [
                {"kind": "dist_to", "a": {"space": "euclidean", "coords": [0.5, 0]}, "w": 0.5},
                {"kind": "half_sq_dist", "a": {"space": "euclidean", "coords": [0, 0.5]}, "w": 0.5}
            ]},
            "schedule": {"kind": "inv_linear", "c": 1},
            "x0": {"space": "euclidean", "coords": [-0.5, 0]},
            "iterations": iterations,
            "seed": 3
        },
        "checks": ["per_step_descent"],
        "output_dir": dir.join("out")
    })
}

fn run_manifest(cmd: &str, path: &Path, extra: &[&str]) -> Output {
    bin().arg(cmd).arg("--manifest").arg(path).args(extra).output().unwrap()
}

#[test]
fn run_writes_one_row_per_iterate() {
    let dir = TempDir::new().unwrap();
    let path = write_manifest(dir.path(), "m", &minimal(dir.path(), 25));
    let out = run_manifest("run", &path, &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 26);
    assert!(!csv.contains('\r'));

    let summary: Value = serde_json::from_slice(&fs::read(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["trajectory"]["rows"], 26);
    let f = column(&csv, "F");
    assert_eq!(summary["trajectory"]["final_f"].as_f64(), f[25]);
    assert_eq!(
        summary["trajectory"]["run_min_f"].as_f64(),
        column(&csv, "run_min_F")[25]
    );
    let min_f = f.iter().map(|v| v.unwrap()).fold(f64::INFINITY, f64::min);
    assert_eq!(summary["trajectory"]["min_recorded_f"].as_f64(), Some(min_f));
    assert!(column(&csv, "erg_F").iter().all(Option::is_none));
    assert_eq!(summary["checks"][0]["status"], "pass");
}

#[test]
fn seed_flag_overrides_the_manifest_and_reruns_are_identical() {
    let dir = TempDir::new().unwrap();
    let path = write_manifest(dir.path(), "m", &minimal(dir.path(), 50));
    let read = |seed: &str, out: &str| {
        let o = run_manifest("run", &path, &["--seed", seed, "--out", out]);
        assert_eq!(code(&o), 0);
        fs::read(Path::new(out).join("trajectory.csv")).unwrap()
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let first = read("5", a.to_str().unwrap());
    assert_eq!(first, read("5", b.to_str().unwrap()));
    assert_ne!(first, read("6", c.to_str().unwrap()));
}

#[test]
fn unwritable_output_dir_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let mut m = minimal(dir.path(), 5);
    m["output_dir"] = json!(blocker.join("sub"));
    let path = write_manifest(dir.path(), "m", &m);
    let out = run_manifest("run", &path, &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not writable"));
}

#[test]
fn configuration_errors_name_the_violated_assumption() {
    let dir = TempDir::new().unwrap();

    let mut unbounded = minimal(dir.path(), 5);
    unbounded["run_config"]["C"] = json!({"kind": "whole_space"});
    let out = run_manifest("run", &write_manifest(dir.path(), "a2", &unbounded), &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("(A2)"), "{}", stderr(&out));

    let mut short = minimal(dir.path(), 5);
    short["run_config"]["schedule"] = json!({"kind": "explicit", "steps": [0.1, 0.1], "tail_sq_bound": 0.0});
    let out = run_manifest("run", &write_manifest(dir.path(), "par", &short), &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("(Par)"), "{}", stderr(&out));

    let mut outside = minimal(dir.path(), 5);
    outside["run_config"]["x0"]["coords"] = json!([2, 0]);
    let out = run_manifest("run", &write_manifest(dir.path(), "x0", &outside), &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("feasibility"));

    let mut unknown = minimal(dir.path(), 5);
    unknown["checks"] = json!(["no_such_check"]);
    let out = run_manifest("run", &write_manifest(dir.path(), "chk", &unknown), &[]);
    assert_eq!(code(&out), 2);
}

#[test]
fn mc_needs_two_replicas() {
    let dir = TempDir::new().unwrap();
    let path = write_manifest(dir.path(), "m", &minimal(dir.path(), 5));
    assert_eq!(code(&run_manifest("mc", &path, &["--replicas", "1"])), 2);
    let out = run_manifest("mc", &path, &["--replicas", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/ensemble.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert!(header.contains(&"dist_sq_stderr") && header.contains(&"run_min_gap_stderr"));
    assert!(!header.contains(&"running_min_bound"));
}

fn column(csv: &str, name: &str) -> Vec<Option<f64>> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().ok()).collect()
}

#[test]
fn single_atom_ensembles_have_zero_spread() {
    let dir = TempDir::new().unwrap();
    let mut m = minimal(dir.path(), 20);
    m["run_config"]["objective"] = json!({"atoms": [
        {"kind": "dist_to", "a": {"space": "euclidean", "coords": [0.5, 0]}, "w": 1}
    ]});
    let path = write_manifest(dir.path(), "m", &m);
    assert_eq!(code(&run_manifest("mc", &path, &["--replicas", "16"])), 0);
    let csv = fs::read_to_string(dir.path().join("out/ensemble.csv")).unwrap();
    for v in column(&csv, "dist_sq_stderr") {
        assert_eq!(v, Some(0.0));
    }
}

#[test]
fn finite_sum_running_minimum_stays_below_the_bound() {
    let dir = TempDir::new().unwrap();
    let m = json!({
        "name": "finite_sum",
        "run_config": experiments::finite_sum(1000, 17).config,
        "checks": ["running_min_bound", "per_step_descent"],
        "replicas": 100,
        "output_dir": dir.path().join("out")
    });
    let out = run_manifest("mc", &write_manifest(dir.path(), "m", &m), &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out/ensemble.csv")).unwrap();
    let mean = column(&csv, "run_min_gap_mean");
    let se = column(&csv, "run_min_gap_stderr");
    let bound = column(&csv, "running_min_bound");
    let mut compared = 0;
    for ((m, s), b) in mean.iter().zip(&se).zip(&bound) {
        if let Some(b) = b {
            assert!(m.unwrap() <= b + 2.0 * s.unwrap());
            compared += 1;
        }
    }
    assert_eq!(compared, 999);
    let summary: Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/ensemble_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["skipped_checks"], json!(["per_step_descent"]));
}

#[test]
fn verify_geometry_passes_and_reports_anchors() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["verify", "--suite", "geometry", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("verify_geometry.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks
        .iter()
        .all(|c| c["anchor"].as_str().is_some_and(|a| !a.is_empty())));
    assert!(dir.path().join("verify_geometry_defects.csv").exists());
}

#[test]
fn verify_with_an_overstated_speed_fails_the_speed_check() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["verify", "--suite", "integrands", "--inject-fault", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&fs::read(dir.path().join("verify_integrands.json")).unwrap()).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|n| n.ends_with("speed_bound")), "{failed:?}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = bin().args(["verify", "--suite", "topology"]).output().unwrap();
    assert_eq!(code(&out), 2);
}

fn rate_inputs(t: f64) -> RateInputs {
    RateInputs {
        l: 0.16,
        t,
        b: 0.0088,
        alpha: 1.0,
        schedule: StepSchedule::InvLinear { c: 1.0 },
    }
}

#[test]
fn rates_table_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let inputs = rate_inputs(1.645);
    let path = dir.path().join("rates.json");
    fs::write(&path, serde_json::to_string(&inputs).unwrap()).unwrap();
    let out = bin()
        .args(["rates", "--eps", "1,0.5,0.1", "--lambda", "0.5", "--manifest"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    let mut last_rho = 0;
    for (row, eps) in rows[1..4].iter().zip([1.0, 0.5, 0.1]) {
        let r: u64 = row[3].parse().unwrap();
        assert_eq!(r, rho(&inputs, eps).unwrap());
        assert!(r >= last_rho);
        last_rho = r;
    }
    for row in &rows[6..9] {
        assert_eq!(row[2], row[3], "rho' must equal rho at the product");
    }
}

#[test]
fn rates_reject_a_too_small_square_sum_bound() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("rates.json");
    fs::write(&path, serde_json::to_string(&rate_inputs(1.0)).unwrap()).unwrap();
    let out = bin().args(["rates", "--manifest"]).arg(&path).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("must exceed"));
}

#[test]
fn star_tree_manifests_round_trip() {
    let dir = TempDir::new().unwrap();
    let m = json!({
        "name": "star",
        "run_config": experiments::mixture(Model::StarTree, Mixture::HalfSq, 100, 1).config,
        "checks": ["per_step_descent", "strong_convexity_gap"],
        "output_dir": dir.path().join("out")
    });
    let out = run_manifest("run", &write_manifest(dir.path(), "m", &m), &[]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_slice(&fs::read(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["target"]["source"], "leg_search");
}
