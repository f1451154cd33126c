//! The 3-sphere splits its isometries: with the volume constraint active,
//! only half of the six Killing fields survive as variational symmetries.
//!
//! The obstruction is concrete. For X1..X3 the gauge divergence condition
//! keeps polar-angle dependence whose antiderivative leaves the elementary
//! closed-form class, so no admissible gauge vector exists. Dropping the
//! constraint (lambda = 0) restores all six.

use minsurf::catalogue;
use minsurf::noether::{build_lagrangian, check_noether, check_unconstrained, Lambda};
use minsurf::sample::SampleConfig;

fn main() -> minsurf::Result<()> {
    let entry = catalogue::load("sphere3", None)?;
    let cfg = SampleConfig::default();
    let lag = build_lagrangian(
        entry.metric.clone(),
        Lambda::Symbolic,
        entry.volume.clone(),
        &cfg,
    )?;

    println!("with the volume constraint (lambda symbolic):");
    for f in &entry.fields {
        let analysis = check_noether(&lag, &f.field, &cfg)?;
        println!("  {:3} -> {}", f.field.name, analysis.verdict);
    }

    println!("\nwithout the constraint (lambda = 0):");
    for f in &entry.fields {
        let analysis = check_unconstrained(&lag, &f.field, &cfg)?;
        println!("  {:3} -> {}", f.field.name, analysis.verdict);
    }
    Ok(())
}
