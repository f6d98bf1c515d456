//! Initial curvature and energy of projected circle polygons under refinement.
//!
//! cargo run --example initial_data

use std::f64::consts::{PI, SQRT_2};

use wilflow::init::InitialData;
use wilflow::{build_curve, ShapeSpec};

fn main() -> wilflow::Result<()> {
    println!("{:>5} {:>14} {:>14} {:>14}", "J", "max|kappa+1|", "|E - 8pi|", "|E - 4pi^2|");
    for j in [16, 32, 64, 128, 256] {
        let sphere = InitialData::from_curve(&build_curve(&ShapeSpec::Semicircle { radius: 1.0 }, j, 0.0)?)?;
        let torus = InitialData::from_curve(&build_curve(
            &ShapeSpec::TorusCircle { major: SQRT_2, minor: 1.0 },
            j,
            0.0,
        )?)?;
        let k_err = sphere.kappa.iter().fold(0.0_f64, |m, k| m.max((k + 1.0).abs()));
        println!(
            "{j:>5} {k_err:>14.3e} {:>14.3e} {:>14.3e}",
            (sphere.energy(0.0) - 8.0 * PI).abs(),
            (torus.energy(0.0) - 4.0 * PI * PI).abs()
        );
    }
    Ok(())
}
