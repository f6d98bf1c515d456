//! Clifford torus: position, manifold distance and energy errors of the linear scheme.
//!
//! cargo run --release --example torus_convergence -- [levels]

use wilflow::analysis::{convergence_study, StudyKind};

fn main() -> wilflow::Result<()> {
    let levels = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let table = convergence_study(StudyKind::Torus, levels)?;
    print!("{}", table.to_text());
    Ok(())
}
