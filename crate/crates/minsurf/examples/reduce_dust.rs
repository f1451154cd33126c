//! Reduce the graph equation of the dust-era expanding slices along two
//! commuting translations, check the resulting profile equation against
//! the published reference form, and march it numerically.

use minsurf::catalogue;
use minsurf::integrate::{integrate, OdeOptions, Termination};
use minsurf::noether::{build_lagrangian, Lambda};
use minsurf::reduction::{
    compare_up_to_factor, dust_reference_ode, normalize_for_comparison, reduce,
    translation_field, Proportionality, REDUCED_DEP,
};
use minsurf::sample::SampleConfig;

fn main() -> minsurf::Result<()> {
    let entry = catalogue::load("frw-dust", None)?;
    let cfg = SampleConfig::default();
    let lag = build_lagrangian(
        entry.metric.clone(),
        Lambda::Symbolic,
        entry.volume.clone(),
        &cfg,
    )?;

    let symmetries = vec![
        translation_field(&lag.metric, "y")?,
        translation_field(&lag.metric, "z")?,
    ];
    let red = reduce(&lag.metric, &lag.euler_lagrange(), &symmetries, &cfg)?;
    println!("eliminated {} and {}; profile is s(x) with s = {}",
        red.eliminated[0], red.eliminated[1], red.dependent);
    println!("reduced equation: {} = 0", red.ode);

    // The raw reduction carries the cleared-denominator form of the engine;
    // normalization multiplies through by the radical and positive powers
    // of s so the comparison sees matching polynomial shapes.
    let normalized = normalize_for_comparison(&red.ode, &[REDUCED_DEP]);
    match compare_up_to_factor(&normalized, &dust_reference_ode(), &cfg)? {
        Proportionality::Proportional { factor } => {
            println!("reference form reproduced, overall factor {factor:.9}");
        }
        Proportionality::NotProportional { reason } => {
            println!("reference form NOT reproduced: {reason}");
        }
    }

    // March the profile with the multiplier bound to 1/2. The solution
    // blows up in finite x, so a short span is the honest default.
    let sol = integrate(&red.ode, 0.5, (0.0, 1.0, 0.0), 0.25, &OdeOptions::default())?;
    let n = sol.xs.len();
    println!(
        "\nintegrated lambda = 1/2 from (s, s') = (1, 0): {} rows, {}",
        n,
        match &sol.termination {
            Termination::Completed => "completed".to_string(),
            Termination::DomainExit { at, reason } => format!("stopped at x = {at:.6} ({reason})"),
        }
    );
    println!(
        "endpoint: s({:.3}) = {:.12}, s' = {:.12}",
        sol.xs[n - 1],
        sol.ss[n - 1],
        sol.sps[n - 1]
    );
    println!("largest finite-difference residual along the trace: {:.3e}", sol.max_residual);
    Ok(())
}
