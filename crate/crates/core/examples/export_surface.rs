//! Revolves generating curves into OBJ surface meshes.
//!
//! cargo run --release --example export_surface -- [out_dir]

use std::path::PathBuf;

use wilflow::init::InitialData;
use wilflow::io::export_surface_obj;
use wilflow::{build_curve, ShapeSpec};

fn main() -> wilflow::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "out/surfaces".into());
    std::fs::create_dir_all(&dir)?;
    let shapes = [
        ("sphere", ShapeSpec::Semicircle { radius: 1.0 }),
        ("disc", ShapeSpec::Disc { width: 7.0, height: 1.0 }),
        ("capsule", ShapeSpec::RoundedCylinder { width: 2.0, height: 6.0 }),
        ("torus", ShapeSpec::TorusCircle { major: 2f64.sqrt(), minor: 1.0 }),
        ("annulus", ShapeSpec::Stadium { length: 4.0, height: 1.0, center: [4.0, 0.0] }),
    ];
    for (name, shape) in shapes {
        let x0 = InitialData::from_curve(&build_curve(&shape, 64, 0.0)?)?.curve;
        let path = dir.join(format!("{name}.obj"));
        export_surface_obj(&x0, 48, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}
