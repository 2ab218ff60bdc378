use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn h2r(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h2r"))
        .args(args)
        .env_remove("H2R_TOL")
        .output()
        .expect("binary runs")
}

fn q_residual(p: [f64; 3]) -> f64 {
    let [x, y, t] = p;
    1.0 - x * x - y * y - t.cos() * ((1.0 + x).powi(2) + y * y)
}

fn obj_vertices(path: &Path) -> Vec<[f64; 3]> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn verify_all_passes_with_small_curvature() {
    let out = h2r(&["verify", "--suite", "all", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    let families = report["families"].as_array().unwrap();
    assert_eq!(families.len(), 11);
    for f in families {
        assert!(f["samples"].as_u64().unwrap() >= 200);
        assert!(f["max_abs_h"].as_f64().unwrap() < 1e-6, "{f}");
    }
}

#[test]
fn tightened_tolerance_fails_with_error_json() {
    let out = Command::new(env!("CARGO_BIN_EXE_h2r"))
        .args(["verify", "--suite", "jacobi"])
        .env("H2R_TOL", "gauge=0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invariant");
    assert!(!err["error"]["failed"].as_array().unwrap().is_empty());
}

#[test]
fn q_mesh_vertices_lie_on_the_surface() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.obj");
    let out = h2r(&["mesh", "--family", "q", "--box", "2", "--grid", "32", "32", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let verts = obj_vertices(&path);
    assert!(verts.len() > 100);
    let worst = verts.iter().map(|&v| q_residual(v).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn tall_height_just_above_pi() {
    let out = h2r(&["height", "--family", "tall", "--d", "0.01"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "d,height,monotone,above_pi,below_pi");
    let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
    let h: f64 = cols[1].parse().unwrap();
    assert!(h > std::f64::consts::PI && h < std::f64::consts::PI + 0.2);
    assert_eq!(cols[3], "true");

    let out = h2r(&["height", "--family", "tall", "--d", "0.01", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["above_pi"], true);
}

#[test]
fn csv_outputs_are_byte_identical_across_runs() {
    for args in [
        &["profile", "--family", "catenoid", "--k", "0.5"][..],
        &["profile", "--family", "tall", "--d", "0.3"],
        &["jacobi", "--field", "w-cat", "--grid", "16", "16"],
    ] {
        let a = h2r(args);
        let b = h2r(args);
        assert!(a.status.success());
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn meshes_for_every_family() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["--family", "catenoid", "--k", "1"][..],
        &["--family", "unduloid", "--k", "1"],
        &["--family", "parabolic"],
        &["--family", "parabolic", "--lambda", "2"],
        &["--family", "tall", "--d", "0.5"],
        &["--family", "tall", "--d", "0.5", "--extended"],
        &["--family", "tall", "--d", "0.5", "--copies", "1"],
    ] {
        let path = dir.path().join("m.obj");
        let mut full = vec!["mesh", "--grid", "24", "16", "--out", path.to_str().unwrap()];
        full.extend_from_slice(args);
        let out = h2r(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.lines().any(|l| l.starts_with("f ")), "{args:?}");
        if args.contains(&"--copies") {
            assert!(obj_vertices(&path).iter().all(|v| v[0] * v[0] + v[1] * v[1] < 1.0));
        }
    }
}

#[test]
fn solve_job_writes_field_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.json");
    std::fs::write(&job, r#"{"X": 12, "nx": 128, "nt": 65, "source": {"kind": "manufactured"}}"#).unwrap();
    let field = dir.path().join("u.csv");
    let out = h2r(&["solve", job.to_str().unwrap(), "--field", field.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["manufactured_error"].as_f64().unwrap() < 1e-3);
    let csv = std::fs::read_to_string(&field).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,t,u");
    assert_eq!(csv.lines().count(), 1 + 128 * 65);
}

#[test]
fn invalid_parameters_exit_nonzero_with_error_json() {
    for args in [
        &["height", "--family", "tall", "--d", "1.5"][..],
        &["profile", "--family", "catenoid", "--k", "-1"],
        &["jacobi", "--grid", "8", "8"],
        &["mesh", "--family", "q", "--format", "csv"],
    ] {
        let out = h2r(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert!(err["error"]["message"].is_string());
    }
    let out = h2r(&["solve", "/nonexistent/job.json"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}
