//! With a large spontaneous curvature the annulus shrinks onto the axis and pinches off.
//!
//! cargo run --release --example annulus_pinch_off -- [kbar]

use wilflow::{run_simulation, RunConfig, SchemeKind, ShapeSpec, Termination};

fn main() -> wilflow::Result<()> {
    let kbar: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let shape = ShapeSpec::Stadium {
        length: 4.0,
        height: 1.0,
        center: [4.0, 0.0],
    };
    let cfg = RunConfig::new(shape, kbar, 128, 2.5e-4, 4.0, SchemeKind::Linear);
    let out = run_simulation(&cfg)?;
    for d in out.diagnostics.iter().step_by(400) {
        println!("t = {:6.3}  energy = {:9.4}  min r = {:.5}", d.t, d.energy, d.min_r);
    }
    match out.termination {
        Termination::PinchOff { t, r, node, .. } => {
            println!("pinch-off at t = {t:.5}: node {node} reached r = {r:.3e}")
        }
        ref other => println!("no pinch-off: {other:?}"),
    }
    Ok(())
}
