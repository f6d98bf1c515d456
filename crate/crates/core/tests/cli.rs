use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_wilflow");

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs"))
}

fn wilflow(cwd: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(cwd)
        .env("WILFLOW_THREADS", "1")
        .args(args)
        .output()
        .unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap_or_else(|e| {
        panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("ex1_sphere.json");
    let out = wilflow(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["termination"]["reason"], "completed");

    let run_dir = dir.path().join("out/ex1_sphere");
    let diag = fs::read_to_string(run_dir.join("diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(
        lines.next(),
        Some("step,t,energy,mesh_ratio,min_r,max_V,picard_iters,residual")
    );
    assert_eq!(lines.count(), 26);

    for label in ["0", "0.2", "0.4", "0.6", "0.8", "1"] {
        let curve = fs::read_to_string(run_dir.join(format!("curve_t{label}.csv"))).unwrap();
        assert!(curve.starts_with("j,rho,r,z,varkappa,kappa,V"), "curve_t{label}");
        assert_eq!(curve.lines().count(), 34);
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(run_dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["steps"], 25);
    assert_eq!(meta["config"]["J"], 32);
}

#[test]
fn invalid_config_reports_field_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"shape":{"kind":"semicircle","radius":1.0},"kbar":0.0,"J":32,"dt":-0.1,"T":1.0,"scheme":"linear"}"#,
    )
    .unwrap();
    let out = wilflow(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert_eq!(err["field"], "dt");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn missing_config_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = wilflow(dir.path(), &["run", "does_not_exist.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["exit_code"], 2);
}

#[test]
fn picard_failure_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("picard.json");
    fs::write(
        &path,
        r#"{"shape":{"kind":"semicircle","radius":1.0},"eps":0.1,"kbar":-1.0,"J":32,"dt":0.04,"T":0.2,"scheme":"nonlinear","picard_max":1}"#,
    )
    .unwrap();
    let out = wilflow(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let summary = stderr_json(&out);
    assert_eq!(summary["termination"]["reason"], "failed");
    assert_eq!(summary["termination"]["kind"], "picard_divergence");
    assert!(dir.path().join("out/picard/diagnostics.csv").exists());
}

#[test]
fn converge_single_level_has_no_eoc() {
    let dir = tempfile::tempdir().unwrap();
    let out = wilflow(dir.path(), &["converge", "sphere-nonlinear", "1", "--out", "conv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("conv/rows.json")).unwrap()).unwrap();
    assert_eq!(rows["rows"].as_array().unwrap().len(), 1);
    let csv = fs::read_to_string(dir.path().join("conv/table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(dir.path().join("conv/table.txt").exists());
}

#[test]
fn converge_rejects_unknown_kind() {
    let dir = tempfile::tempdir().unwrap();
    let out = wilflow(dir.path(), &["converge", "cube", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_obj_from_written_curve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("ex1_sphere.json");
    assert_eq!(wilflow(dir.path(), &["run", cfg.to_str().unwrap()]).status.code(), Some(0));
    let curve = dir.path().join("out/ex1_sphere/curve_t1.csv");
    let obj = dir.path().join("sphere.obj");
    let out = wilflow(
        dir.path(),
        &["export-obj", curve.to_str().unwrap(), obj.to_str().unwrap(), "--segments", "16"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&obj).unwrap();
    let verts = text.lines().filter(|l| l.starts_with("v ")).count();
    // 31 interior rings of 16 plus two poles
    assert_eq!(verts, 31 * 16 + 2);
    assert!(text.lines().any(|l| l.starts_with("f ")));
}
