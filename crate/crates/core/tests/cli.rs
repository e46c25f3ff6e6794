use std::path::PathBuf;
use std::process::{Command, Output};

use meridian_lab::minkowski::{inner4, SpacetimeVector};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meridian-lab"))
        .args(args)
        .env_remove("MERIDIAN_LAB_TOL")
        .output()
        .expect("binary runs")
}

fn classify(name: &str) -> (i32, serde_json::Value) {
    let path = fixture(name);
    let out = run(&["classify", "--config", path.to_str().unwrap()]);
    let code = out.status.code().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (code, json)
}

#[test]
fn plane_is_thm_4_1() {
    let (code, report) = classify("plane.json");
    assert_eq!(code, 0);
    assert_eq!(report["verdict"]["matched_theorem_case"], "Thm 4.1");
    assert_eq!(report["verdict"]["category"], "harmonic");
    assert!(report.get("timing").is_none());
    assert!(report["laplacian"]["tolerance"].as_f64().is_some());
}

#[test]
fn constant_f_anchor_is_thm_5_2_ii() {
    let (code, report) = classify("thm52_anchor.json");
    assert_eq!(code, 0);
    assert_eq!(report["verdict"]["matched_theorem_case"], "Thm 5.2(ii)");
    for key in ["lambda_min", "lambda_max"] {
        let lambda = report["verdict"][key].as_f64().unwrap();
        assert!((lambda + 3.0).abs() <= 1e-9, "{key} = {lambda}");
    }
}

#[test]
fn ode_profiles_classify() {
    assert_eq!(classify("first_hyperbolic_ode.json").1["verdict"]["matched_theorem_case"], "Thm 5.2(i)");
    assert_eq!(classify("second_elliptic_ode.json").1["verdict"]["matched_theorem_case"], "Thm 6.1(iii)");
    assert_eq!(classify("thm61_linear.json").1["verdict"]["matched_theorem_case"], "Thm 6.1(i)");
}

#[test]
fn generic_surface_exits_2() {
    let (code, report) = classify("generic.json");
    assert_eq!(code, 2);
    assert_eq!(report["verdict"]["category"], "none");
    assert!(report["verdict"]["matched_theorem_case"].is_null());
}

#[test]
fn config_errors_are_located() {
    let path = fixture("bad_field.json");
    let out = run(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5") && err.contains("base.curvature"), "{err}");
}

#[test]
fn classify_is_byte_identical() {
    let path = fixture("thm52_anchor.json");
    let a = run(&["classify", "--config", path.to_str().unwrap()]);
    let b = run(&["classify", "--config", path.to_str().unwrap(), "--jobs", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tolerance_file_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let strict = dir.path().join("strict.json");
    std::fs::write(&strict, r#"{ "harmonic": 1e-30 }"#).unwrap();
    let loose = dir.path().join("loose.json");
    std::fs::write(&loose, r#"{ "harmonic": 1e-6 }"#).unwrap();
    let plane = fixture("plane.json");
    let out = run(&["classify", "--config", plane.to_str().unwrap(), "--tol-file", strict.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["verdict"]["tolerances"]["harmonic"], 1e-30);
    let out = Command::new(env!("CARGO_BIN_EXE_meridian-lab"))
        .args(["classify", "--config", plane.to_str().unwrap(), "--tol-file", strict.to_str().unwrap()])
        .env("MERIDIAN_LAB_TOL", &loose)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["verdict"]["tolerances"]["harmonic"], 1e-6);
}

#[test]
fn solve_ode_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("first.csv");
    let out = run(&["solve-ode", "first_elliptic", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let residual: f64 = stderr.split("residual_max = ").nth(1).unwrap().split(|c: char| c == ',' || c.is_whitespace()).next().unwrap().parse().unwrap();
    assert!(residual <= 1e-6, "{stderr}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# case=first_elliptic"));
    assert_eq!(lines.next().unwrap(), "u,f,df,d2f,residual");
    assert_eq!(lines.count(), 1001);
    let again = run(&["solve-ode", "first_elliptic"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn solve_ode_c_zero_exits_3() {
    let out = run(&["solve-ode", "second_elliptic", "--set", "c=0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("c must be nonzero"));
    assert!(out.stdout.is_empty());
}

#[test]
fn solve_ode_regime_violation_reports_u_stop() {
    let out = run(&["solve-ode", "second_hyperbolic", "--set", "c=1.2"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    let u_stop: f64 = err.split("u_stop = ").nth(1).unwrap().trim().parse().unwrap();
    assert!(u_stop > 0.0 && u_stop < 1.0, "{err}");
}

#[test]
fn solve_ode_rejects_unknown_parameter() {
    let out = run(&["solve-ode", "first_elliptic", "--set", "bogus=1"]);
    assert_eq!(out.status.code(), Some(1));
}

fn sample(name: &str) -> Vec<[f64; 6]> {
    sample_path(&fixture(name))
}

fn sample_path(path: &std::path::Path) -> Vec<[f64; 6]> {
    let out = run(&["sample", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# kind="));
    assert_eq!(lines.next().unwrap(), "u,v,x1,x2,x3,x4");
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4], v[5]]
        })
        .collect()
}

#[test]
fn sample_plane_rows() {
    let rows = sample("plane.json");
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r[5] == rows[0][5]));
}

#[test]
fn sample_constant_f_axis_is_linear() {
    for r in sample("thm52_anchor.json") {
        assert!((r[2] - r[0]).abs() <= 1e-12, "x1 = {} at u = {}", r[2], r[0]);
    }
}

/// `<z_v, z_v> / f^2` from the CSV alone, using rows sharing `u`.
#[test]
fn sample_round_trip_metric() {
    for (name, f_of_u) in [("plane.json", (|u: f64| 1.0 + u) as fn(f64) -> f64), ("thm52_anchor.json", |_u| 1.0), ("thm61_linear.json", |u| u + 0.5)] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        cfg["grid"] = serde_json::json!({ "nu": 4, "nv": 400, "margin": 0.02 });
        let path = dir.path().join(name);
        std::fs::write(&path, cfg.to_string()).unwrap();
        let rows = sample_path(&path);
        let mut worst = 0.0_f64;
        for w in rows.windows(3) {
            if w[0][0] != w[2][0] {
                continue;
            }
            let dv = w[2][1] - w[0][1];
            let zv = SpacetimeVector(std::array::from_fn(|k| (w[2][k + 2] - w[0][k + 2]) / dv));
            let f = f_of_u(w[1][0]);
            worst = worst.max((inner4(&zv, &zv) / (f * f) - 1.0).abs());
        }
        assert!(worst <= 1e-3, "{name}: {worst}");
    }
}

#[test]
fn verify_rejects_unknown_suite() {
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(1));
}

#[test]
fn verify_harmonic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("verify.json");
    let out = run(&["verify", "harmonic", "--out", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 2);
}
