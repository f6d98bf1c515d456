//! Runs a JSON configuration and writes its outputs, like `wilflow run`.
//!
//! cargo run --release --example run_config -- crates/core/examples/configs/ex1_sphere.json

use std::path::PathBuf;

use wilflow::io::write_run_outputs;
use wilflow::{run_simulation, RunConfig};

fn main() -> wilflow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "crates/core/examples/configs/ex1_sphere.json".into());
    let cfg = RunConfig::from_path(&path)?;
    let out = run_simulation(&cfg)?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| "out/run".into());
    for p in write_run_outputs(&dir, &out)? {
        println!("{}", p.display());
    }
    println!("{:?}", out.termination);
    Ok(())
}
