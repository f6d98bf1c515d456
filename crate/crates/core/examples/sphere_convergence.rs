//! Convergence of both schemes towards the exact expanding sphere.
//!
//! cargo run --release --example sphere_convergence -- [levels]

use wilflow::analysis::{convergence_study, SphereExact, StudyKind};

fn main() -> wilflow::Result<()> {
    let levels = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let exact = SphereExact::new(-1.0, 1.0)?;
    println!("exact radius r(1) = {:.12}, energy E(1) = {:.12}\n", exact.radius(1.0)?, exact.energy(1.0)?);
    for kind in [StudyKind::SphereLinear, StudyKind::SphereNonlinear] {
        let table = convergence_study(kind, levels)?;
        println!("{}:\n{}", kind.name(), table.to_text());
    }
    Ok(())
}
