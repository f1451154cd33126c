//! Symmetry analysis over a whole family of metrics at once: the static
//! spherically symmetric class keeps its lapse and radial profile as
//! opaque functions nu(R), mu(R), so one run covers every member.
//!
//! Opaque functions stay unevaluated through differentiation and are
//! sampled as independent values (function, first, second derivative)
//! inside declared boxes, so verdicts hold for generic profiles.

use minsurf::catalogue;
use minsurf::noether::{build_lagrangian, check_noether, GaugeOutcome, Lambda};
use minsurf::sample::SampleConfig;

fn main() -> minsurf::Result<()> {
    let entry = catalogue::load("static-spherical", None)?;
    let cfg = SampleConfig::default();

    println!("metric components along the slice:");
    for (i, row) in entry.metric.h.iter().enumerate() {
        for (j, component) in row.iter().enumerate() {
            if !component.is_lit_zero() {
                let names = &entry.metric.coords;
                println!("  h[{}][{}] ({},{}) = {component}", i, j, names[i], names[j]);
            }
        }
    }
    match &entry.volume {
        Some(v) => println!("volume potential: {v} with dW/dR declared by rule"),
        None => println!("volume potential: none declared"),
    }

    let lag = build_lagrangian(
        entry.metric.clone(),
        Lambda::Symbolic,
        entry.volume.clone(),
        &cfg,
    )?;
    println!("\nverdicts (timelike translation and the rotation algebra):");
    for f in &entry.fields {
        let analysis = check_noether(&lag, &f.field, &cfg)?;
        let gauge = match &analysis.gauge {
            Some(GaugeOutcome::Constructed { a, .. }) => {
                let all_zero = a.iter().all(|c| c.is_lit_zero());
                if all_zero { "gauge vanishes" } else { "nontrivial gauge" }
            }
            _ => "no gauge",
        };
        println!("  {:3} -> {}  ({gauge})", f.field.name, analysis.verdict);
    }
    Ok(())
}
