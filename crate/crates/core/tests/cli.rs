use std::process::{Command, Output};

use serde_json::Value;

fn rotadrop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotadrop"))
        .args(args)
        .env_remove("ROTADROP_TOL")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().expect("diagnostic line")).expect("json on stderr")
}

#[test]
fn classify_type_i() {
    let out = rotadrop(&["classify", "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["type"], "TypeI");
    assert!((v["c0"].as_f64().unwrap() - 1.1795).abs() < 1e-4);
    assert!(v["r1"].is_null() && v["r2"].is_null());
}

#[test]
fn classify_flip_is_announced() {
    let out = rotadrop(&["classify", "--a", "1", "--b", "-2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["type"], "TypeIIb");
    assert_eq!(stdout_json(&out)["flipped"], true);
    assert_eq!(stderr_json(&out)["note"], "flipped");
}

#[test]
fn classify_evaluates_first_integral_with_d() {
    let out = rotadrop(&["classify", "--a", "1", "--b", "1", "--c", "0.5", "--d", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    // 0.5 (0.25 + 2) / 4 + 0.1 / 0.5
    assert!((v["first_integral"].as_f64().unwrap() - 0.48125).abs() < 1e-15);
}

#[test]
fn d_rejected_outside_classify() {
    let out = rotadrop(&["report", "--a", "1", "--b", "1", "--d", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn verify_sphere_passes() {
    let out = rotadrop(&["verify", "--a", "0", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    for check in v.as_array().unwrap() {
        let status = check["status"].as_str().unwrap();
        assert!(status != "fail", "{check}");
    }
}

#[test]
fn verify_type_iia_gates() {
    let out = rotadrop(&["verify", "--a", "-1", "--b", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let by_name = |n: &str| v.as_array().unwrap().iter().find(|c| c["name"] == n).unwrap().clone();
    assert_eq!(by_name("sandwich_upper")["status"], "skipped");
    assert_eq!(by_name("serrin_type")["hypothesis_met"], false);
    assert_eq!(by_name("heinz")["status"], "pass");
    assert_eq!(by_name("flux_identity")["status"], "pass");
}

#[test]
fn invalid_tolerance_env_falls_back_to_default() {
    // A negative tolerance is rejected by the parser and falls back to the default.
    let out = Command::new(env!("CARGO_BIN_EXE_rotadrop"))
        .args(["verify", "--a", "1", "--b", "1"])
        .env("ROTADROP_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn report_fields() {
    let out = rotadrop(&["report", "--a", "0", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut want = vec![
        "area",
        "volume",
        "height",
        "energy",
        "q_n1",
        "c0",
        "flux_residual",
        "heinz_margin",
    ];
    let mut got = keys.clone();
    want.sort();
    got.sort();
    assert_eq!(got, want);
    assert!((v["area"].as_f64().unwrap() - 16.0 * std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn report_truncated() {
    let out = rotadrop(&["report", "--a", "1", "--b", "1", "--c", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["height"].as_f64().unwrap() > 0.0);
}

#[test]
fn out_of_range_radius_is_an_argument_error() {
    let out = rotadrop(&["report", "--a", "0", "--b", "1", "--c", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "out_of_range");
}

#[test]
fn threshold_profile_is_a_numeric_error() {
    let out = rotadrop(&["report", "--a", "-2", "--b", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "not_closed");
}

#[test]
fn degenerate_parameters_rejected() {
    let out = rotadrop(&["classify", "--a", "0", "--b", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(rotadrop(&["classify", "--a", "x", "--b", "1"]).status.code(), Some(2));
    assert_eq!(rotadrop(&["classify", "--b", "1"]).status.code(), Some(2));
    assert_eq!(rotadrop(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        rotadrop(&["report", "--a", "1", "--b", "1", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    let out = rotadrop(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
}

#[test]
fn solve_csv_and_json() {
    let out = rotadrop(&["solve", "--a", "1", "--b", "1", "--samples", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,r,u,psi"));
    assert_eq!(lines.count(), 9);

    let out = rotadrop(&["solve", "--a", "1", "--b", "1", "--samples", "9", "--format", "json"]);
    let v = stdout_json(&out);
    assert_eq!(v["samples"].as_array().unwrap().len(), 9);
    assert_eq!(v["stop_reason"], "VerticalTangent");
}

#[test]
fn solve_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let out = rotadrop(&["solve", "--a", "-1", "--b", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("s,r,u,psi\n"));

    let bad = dir.path().join("missing").join("p.csv");
    let out = rotadrop(&["solve", "--a", "1", "--b", "1", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn mesh_writes_obj_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drop.obj");
    let out = rotadrop(&[
        "mesh",
        "--a",
        "0",
        "--b",
        "1",
        "--n-theta",
        "16",
        "--n-s",
        "16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["max"].as_f64().unwrap() < 0.1);
    assert_eq!(v["n_interior"], 16 * 31);
    let obj = std::fs::read_to_string(&path).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16 * 31 + 2);

    let cap = dir.path().join("cap.obj");
    let out = rotadrop(&[
        "mesh",
        "--a",
        "1",
        "--b",
        "1",
        "--c",
        "0.8",
        "--n-theta",
        "16",
        "--n-s",
        "16",
        "--out",
        cap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(rotadrop(&["mesh", "--a", "1", "--b", "1"]).status.code(), Some(2));
}

#[test]
fn sweep_is_ordered() {
    let out = rotadrop(&["sweep", "--a", "1,0", "--b", "2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let points: Vec<(f64, f64)> = text
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["a"].as_f64().unwrap(), v["b"].as_f64().unwrap())
        })
        .collect();
    assert_eq!(points, vec![(1.0, 2.0), (1.0, 1.0), (0.0, 2.0), (0.0, 1.0)]);
}

#[test]
fn sweep_accepts_negative_lists() {
    let out = rotadrop(&["sweep", "--a", "-1,-2", "--b", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn sweep_reports_failed_points() {
    let out = rotadrop(&["sweep", "--a", "1,-2", "--b", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert!(last["error"].is_string());
}
