//! A flat 7 x 1 x 7 disc relaxing to a sphere (energy close to 8 pi).
//!
//! cargo run --release --example disc_to_sphere -- [kbar] [T] [out_dir]

use std::f64::consts::PI;
use std::path::PathBuf;

use wilflow::io::write_run_outputs;
use wilflow::{run_simulation, RunConfig, SchemeKind, ShapeSpec};

fn main() -> wilflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let kbar: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let t_end: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let out_dir = args.next().map(PathBuf::from).unwrap_or_else(|| "out/disc_to_sphere".into());

    let shape = ShapeSpec::Disc { width: 7.0, height: 1.0 };
    let mut cfg = RunConfig::new(shape, kbar, 128, 1e-3, t_end, SchemeKind::Linear);
    cfg.snapshot_times = vec![0.0, t_end.min(0.5), t_end.min(1.0), t_end];
    let out = run_simulation(&cfg)?;
    write_run_outputs(&out_dir, &out)?;

    println!("initial energy {:.4}", out.initial_energy);
    println!("final energy   {:.4} (8 pi = {:.4})", out.final_energy(), 8.0 * PI);
    println!("mesh ratio     {:.4}", out.final_stats.mesh_ratio);
    println!("outputs in {}", out_dir.display());
    Ok(())
}
