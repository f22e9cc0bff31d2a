//! End-to-end checks of the command-line interface: exit codes, error
//! wording, report round trips between stdout and `--out` artifacts, and
//! seed handling.

use std::path::Path;
use std::process::{Command, Output};

use bifloc::dynamics::default_dt;
use bifloc::equilibrium::nearest_equilibrium;
use bifloc::loci::bazykin_hopf;
use bifloc::model::ModelInstance;
use serde_json::{json, Value};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_bifloc")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn bifloc")
}

fn write_config(dir: &Path, value: &Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn missing_key_exits_2_with_verbatim_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &json!({"params": {}}));
    let out = run(&["analyze", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("error: config error: missing key: family"),
        "stderr: {stderr}"
    );
}

#[test]
fn empty_check_list_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"family": "bazykin", "samples": 10, "seed": 1, "checks": []}),
    );
    let out = run(&["verify", "sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("error: config error: no checks requested"),
        "stderr: {stderr}"
    );
}

#[test]
fn bad_parameter_value_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({
            "family": "bazykin",
            "params": {"r": 1.0, "k": 3.0, "a": 1.0, "b": 1.0,
                       "e": 1.0, "d": 0.1, "sigma": -1.0}
        }),
    );
    let out = run(&["analyze", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sigma must be positive"), "stderr: {stderr}");
}

#[test]
fn usage_error_exits_2() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_round_trips_between_stdout_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &json!({
            "family": "bazykin",
            "params": {"r": 1.0, "k": 3.0, "a": 1.0, "b": 1.0,
                       "e": 1.0, "d": 0.1, "sigma": 1.0},
            "series_points": 16
        }),
    );
    let out = run(&["analyze", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["family"], "bazykin");
    let cps = report["critical_points"].as_array().unwrap();
    assert_eq!(cps.len(), 1);
    assert_eq!(cps[0]["kind"], "local_max");
    // vertex of the logistic numerator: (k - b) / 2
    assert!((cps[0]["x"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let written = std::fs::read_to_string(out_dir.join("analyze.json")).unwrap();
    assert_eq!(written, String::from_utf8_lossy(&out.stdout).trim_end());
    let csv = std::fs::read_to_string(out_dir.join("nullcline_series.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,g,g_prime,trace_on_nullcline");
    assert_eq!(lines.len(), 17);
}

#[test]
fn loci_hopf_reports_one_ascending_point() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &json!({"family": "bazykin", "k0": 1, "b": 1, "x0": 1, "r": 1, "sigma": 1}),
    );
    let out = run(&["loci", "hopf", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "hopf");
    assert_eq!(report["family"], "bazykin");
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 1);
    assert_eq!(points[0]["parameter"], "a");
    assert_eq!(points[0]["branch"], "ascending");
    assert_eq!(points[0]["on_expected_branch"], true);
    assert!(points[0]["anchor"].is_null());
    assert!((points[0]["state"]["x"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(out_dir.join("loci_hopf.json").exists());
    assert!(out_dir.join("loci_hopf.csv").exists());

    // the flag adds a stable anchor label to every point
    let out = run(&["loci", "hopf", "--config", &cfg, "--traceability"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(report["points"][0]["anchor"].is_string());
}

#[test]
fn loci_ns_labels_points_by_branch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"family": "discrete_crowley_martin",
                "rho": 1, "k": 2, "a": 1, "b": 1, "d": 1}),
    );
    let out = run(&["loci", "ns", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "neimark_sacker");
    assert_eq!(report["family"], "discrete_crowley_martin");
    let points = report["points"].as_array().unwrap();
    assert!(!points.is_empty());
    // the full scan keeps every unit-modulus point and flags the branch;
    // the vertex of this base sits at x = 0.5
    let mut descending = 0usize;
    for p in points {
        assert_eq!(p["parameter"], "c");
        assert!(p["critical_value"].as_f64().unwrap() > 0.0);
        let on_descending = p["branch"] == "descending";
        assert_eq!(p["on_expected_branch"], Value::Bool(on_descending));
        assert_eq!(p["state"]["x"].as_f64().unwrap() > 0.5, on_descending);
        descending += on_descending as usize;
    }
    assert!(descending > 0, "no descending-branch points at all");
}

#[test]
fn loci_bt_reports_boundary_runs_and_no_interior_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"family": "holling4", "x0_lo": 0.05, "x0_hi": 0.10, "x0_step": 0.01}),
    );
    let out = run(&["loci", "bt", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "bogdanov_takens");
    assert_eq!(report["points"].as_array().unwrap().len(), 0);
    assert!(report["boundary_runs"].is_number());
}

#[test]
fn simulate_classifies_a_convergent_orbit() {
    // stable side of a constructed zero-trace point: the crossing
    // derivative in a is positive, so 2% below the critical value the
    // equilibrium attracts
    let h = bazykin_hopf(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let mut params = h.params;
    params.a *= 0.98;
    let m = ModelInstance::Bazykin(params);
    let eq = nearest_equilibrium(&m, h.state.x).unwrap();
    let dt = default_dt(&m, eq.state);

    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &json!({
            "family": "bazykin",
            "params": {"r": params.r, "k": params.k, "a": params.a, "b": params.b,
                       "e": params.e, "d": params.d, "sigma": params.sigma},
            "start": {"x": eq.state.x * 1.01, "y": eq.state.y * 1.01},
            "steps": 120_000,
            "dt": dt
        }),
    );
    let out = run(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "converges_to_equilibrium");
    assert_eq!(report["clipped"], false);
    assert!((report["reference"]["x"].as_f64().unwrap() - eq.state.x).abs() < 1e-12);
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,x,y");
}

#[test]
fn sweep_is_deterministic_and_honors_seed_override() {
    let mut config = bifloc::sweep::default_campaign()
        .into_iter()
        .next()
        .expect("campaign has a first sweep");
    config.samples = 60;
    config.seed = 7;
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &serde_json::to_value(&config).unwrap());

    let out_dirs = [dir.path().join("first"), dir.path().join("second")];
    let mut reports = Vec::new();
    for out_dir in &out_dirs {
        let out = run(&["verify", "sweep", "--config", &cfg, "--out",
                        out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let digest = stdout_json(&out);
        assert_eq!(digest["all_clear"], true);
        assert_eq!(digest["total_counterexamples"], 0);
        reports.push(std::fs::read(out_dir.join("sweep_bazykin.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1], "same seed must give identical bytes");

    let out = run(&["verify", "sweep", "--config", &cfg, "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let digest = stdout_json(&out);
    assert_eq!(digest["sweeps"][0]["config"]["seed"], 9);
}

#[test]
fn duality_defaults_exit_0_with_ordered_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["verify", "duality", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["all_ordered"], true);
    assert_eq!(report["entries"].as_array().unwrap().len(), 50);
    let csv = std::fs::read_to_string(out_dir.join("duality.csv")).unwrap();
    assert_eq!(csv.lines().count(), 51);
}
