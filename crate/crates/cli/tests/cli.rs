use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weaktype(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weaktype"))
        .args(args)
        .env_remove("WEAKTYPE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(v: &Value) {
    let schema = schema();
    let errors: Vec<String> = schema.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
}

#[test]
fn constants_rows() {
    let out = weaktype(&["constants", "--p", "2", "0.5", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    let rows = v.as_array().unwrap();
    assert!((rows[0]["kp"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(rows[0]["weak_nonneg"]["value"].as_f64(), Some(1.0));
    assert_eq!(rows[1]["weak_nonneg"]["value"].as_f64(), Some(2.0));
    assert!(rows[1]["kp"]["error"].is_string());
    let r3 = &rows[2];
    assert_eq!(r3["weak_nonneg_pth_power"]["value"].as_f64(), Some(1.6875));
    assert!(r3["cp"]["value"].is_number() && r3["weak_nonneg"]["value"].is_number());
    assert!(!r3["reference"].as_array().unwrap().is_empty());
}

#[test]
fn constants_csv_and_all_rows_failing() {
    let out = weaktype(&["constants", "--p", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p,kp,cp,weak_nonneg"));
    assert_eq!(text.lines().count(), 2);

    let bad = weaktype(&["constants", "--p", "-1", "0"]);
    assert_eq!(bad.status.code(), Some(1));
    let v = stdout_json(&bad);
    assert!(v.as_array().unwrap().iter().all(|r| r["error"].is_string()));
}

#[test]
fn verify_ode_passes() {
    let out = weaktype(&["verify", "ode", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    assert_eq!(v["passed"], Value::Bool(true));
    let rk = &v["checks"][0];
    assert_eq!(rk["check"], "rk vs bessel");
    assert!(rk["worst"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_monte_carlo_report() {
    let out = weaktype(&["verify", "mc-strip", "--p", "2", "--n", "20000", "--seed", "7", "--dt", "1e-2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_valid(&v);
    let r = &v["reports"][0];
    assert_eq!(r["seed"], 7);
    assert!(r["margin_sigma"].as_f64().unwrap().abs() < 4.0);
}

#[test]
fn identical_invocations_are_bit_identical() {
    let args = ["verify", "mc-weak-type", "--p", "0.5", "--n", "20", "--paths", "500", "--seed", "3"];
    let a = weaktype(&args);
    let b = weaktype(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(weaktype(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(weaktype(&["verify", "u-weak", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(weaktype(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_out_dir_is_reported() {
    let out = weaktype(&["--out", "/definitely/not/here", "figures", "regions", "--p", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("/definitely/not/here"), "{err}");
}

#[test]
fn figures_with_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = weaktype(&["--out", d, "figures", "trajectories", "--p", "3", "--x", "0.0416667", "--delta", "1.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert!(csv.starts_with("trajectory,step,a,b,x,y\n"));
    let first = csv.lines().nth(1).unwrap();
    assert!(first.starts_with("0,0,0,"));

    let out = weaktype(&["--out", d, "--seed", "9", "figures", "regions", "--p", "3", "--points", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("regions.csv")).unwrap();
    assert!(csv.starts_with("pair,x,y\n"));
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (x, y): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        assert!(x >= -1e-12 && y >= -1e-12, "{line}");
    }

    for stem in ["trajectories", "regions"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{stem}.manifest.json"))).unwrap();
        let m: Value = serde_json::from_str(&text).unwrap();
        assert_valid(&m);
        assert_eq!(m["artifacts"][0], format!("{stem}.csv"));
    }
    let m: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("regions.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["seed"], 9);
    assert_eq!(m["command"], "figures regions");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_weaktype"))
        .args(["gfun", "--p", "3", "--t-max", "2"])
        .env("WEAKTYPE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("gfun.csv")).unwrap();
    assert!(csv.starts_with("t,G,G'\n"));
    assert!(dir.path().join("gfun.manifest.json").exists());
}
