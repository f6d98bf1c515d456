//! A flat annulus (stadium 4 x 1 centred at (4, 0)) evolving towards a torus.
//! With kbar = 0 the radii ratio approaches sqrt 2, the Clifford torus.
//!
//! cargo run --release --example clifford_torus -- [kbar] [T]

use std::f64::consts::{PI, SQRT_2};

use wilflow::{run_simulation, RunConfig, SchemeKind, ShapeSpec};

fn main() -> wilflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let kbar: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let t_end: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let shape = ShapeSpec::Stadium {
        length: 4.0,
        height: 1.0,
        center: [4.0, 0.0],
    };
    let cfg = RunConfig::new(shape, kbar, 128, 2.5e-4, t_end, SchemeKind::Linear);
    let out = run_simulation(&cfg)?;
    let s = out.final_stats;
    println!("t = {}", out.termination.t());
    println!("energy      {:.4} (4 pi^2 = {:.4})", out.final_energy(), 4.0 * PI * PI);
    println!("centre      ({:.4}, {:.4})", s.center[0], s.center[1]);
    println!("mean radius {:.4}", s.mean_radius);
    println!("radii ratio {:.4} (sqrt 2 = {:.4})", s.radii_ratio(), SQRT_2);
    println!("deviation   {:.4}", s.deviation);
    println!("mesh ratio  {:.4}", s.mesh_ratio);
    Ok(())
}
