use std::fs;
use std::path::{Path, PathBuf};

use wilflow::{run_simulation, RunConfig, Termination};

fn shipped() -> Vec<PathBuf> {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs"));
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn load(name: &str) -> RunConfig {
    RunConfig::from_path(&shipped().into_iter().find(|p| p.ends_with(name)).unwrap()).unwrap()
}

#[test]
fn every_config_parses_and_round_trips() {
    let all = shipped();
    for n in 1..=6 {
        assert!(
            all.iter().any(|p| p.file_name().unwrap().to_string_lossy().starts_with(&format!("ex{n}_"))),
            "missing ex{n}"
        );
    }
    for p in all {
        let cfg = RunConfig::from_path(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        cfg.validate().unwrap();
        cfg.initial_curve().unwrap();
        let back = RunConfig::from_json_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(serde_json::to_value(&back).unwrap(), serde_json::to_value(&cfg).unwrap());
    }
}

fn assert_monotone(name: &str) {
    let out = run_simulation(&load(name)).unwrap();
    assert!(matches!(out.termination, Termination::Completed { .. }), "{name}: {:?}", out.termination);
    let mut prev = out.initial_energy;
    for d in &out.diagnostics {
        assert!(d.energy <= prev + 1e-9 * prev.abs().max(1.0), "{name} step {}", d.step);
        prev = d.energy;
    }
}

#[test]
fn sphere_config_runs_with_monotone_energy() {
    assert_monotone("ex1_sphere.json");
}

#[test]
fn cylinder_config_runs_with_monotone_energy() {
    assert_monotone("ex3_cylinder.json");
}

#[test]
fn clifford_torus_config_stays_near_steady_state() {
    let cfg = load("ex4_clifford_torus.json");
    let out = run_simulation(&cfg).unwrap();
    assert!(matches!(out.termination, Termination::Completed { .. }));
    let e = out.final_energy();
    assert!((e - 4.0 * std::f64::consts::PI.powi(2)).abs() < 0.2, "{e}");
}
