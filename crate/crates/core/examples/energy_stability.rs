//! Per-step energy inequality of both schemes for ever larger time steps.
//!
//! cargo run --release --example energy_stability

use wilflow::schemes::StepReport;
use wilflow::{run_with_observer, RunConfig, SchemeKind, ShapeSpec};

fn main() -> wilflow::Result<()> {
    let shape = ShapeSpec::Disc { width: 7.0, height: 1.0 };
    println!("{:<10} {:>8} {:>8} {:>22} {:>12}", "scheme", "dt", "steps", "max relative defect", "final E");
    for scheme in [SchemeKind::Linear, SchemeKind::Nonlinear] {
        for dt in [1e-3, 1e-2, 1e-1] {
            let cfg = RunConfig::new(shape.clone(), 0.0, 128, dt, 2.0, scheme);
            let mut worst = f64::NEG_INFINITY;
            let out = run_with_observer(&cfg, |_, r: &StepReport| {
                worst = worst.max(r.stability_defect() / r.energy_before.abs().max(1.0));
            })?;
            println!(
                "{:<10} {:>8.0e} {:>8} {:>22.3e} {:>12.4}",
                scheme.as_str(),
                dt,
                out.final_state.step,
                worst,
                out.final_energy()
            );
        }
    }
    Ok(())
}
