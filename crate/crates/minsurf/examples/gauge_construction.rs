//! Construct the gauge vectors that turn isometries into variational
//! symmetries of the volume-constrained area functional.
//!
//! In Euclidean 3-space split along the radius, rotations need no gauge at
//! all, while the three translations acquire a quadratic-in-r gauge vector
//! proportional to the volume multiplier.

use minsurf::catalogue;
use minsurf::noether::{build_lagrangian, construct_gauge, GaugeOutcome, Lambda};
use minsurf::sample::SampleConfig;

fn main() -> minsurf::Result<()> {
    let entry = catalogue::load("euclidean3-spherical", None)?;
    let cfg = SampleConfig::default();
    let lag = build_lagrangian(
        entry.metric.clone(),
        Lambda::Symbolic,
        entry.volume.clone(),
        &cfg,
    )?;

    for f in &entry.fields {
        println!("field {}:", f.field.name);
        match construct_gauge(&lag, &f.field, &cfg)? {
            GaugeOutcome::Constructed { a, residue, .. } => {
                for (coord, component) in lag.metric.coords.iter().zip(&a) {
                    println!("  A^{coord} = {component}");
                }
                println!("  divergence residue covered by the slice part: {residue}");
            }
            GaugeOutcome::NoSolution { reason, .. } => {
                println!("  no gauge vector exists: {reason}");
            }
        }
        println!();
    }
    Ok(())
}
