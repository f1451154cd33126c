//! Build Noether currents and watch their divergence vanish on-shell.
//!
//! The round sphere r = const is a stationary surface of the constrained
//! functional exactly when lambda = -2/r (plug a constant graph into the
//! stationarity equation: every jet term drops and what is left is
//! sin(theta)*(2r + lambda r^2)). On that solution the rotation currents
//! are divergence-free.

use std::collections::BTreeMap;

use minsurf::catalogue;
use minsurf::expr::{is_zero, parse, substitute_many, Expr, ZeroVerdict};
use minsurf::noether::{build_lagrangian, jet, jet2, Lambda};
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
    let m = &lag.metric;

    // On the constant graph every jet vanishes; the multiplier that makes
    // the sphere stationary is lambda = -2/r.
    let mut on_shell: BTreeMap<String, Expr> = BTreeMap::new();
    for (i, c) in m.coords.iter().enumerate() {
        on_shell.insert(jet(&m.u, c), Expr::zero());
        for j in i..m.coords.len() {
            on_shell.insert(jet2(&m.u, &m.coords, i, j), Expr::zero());
        }
    }
    on_shell.insert("lambda".into(), parse("-2/r")?);

    let scfg = m.sampling(&cfg);
    let stationarity = substitute_many(&lag.euler_lagrange(), &on_shell);
    match is_zero(&stationarity, &scfg, &m.singular)? {
        ZeroVerdict::Zero => println!("constant graph with lambda = -2/r is stationary"),
        other => println!("unexpected stationarity verdict: {other:?}"),
    }

    // Rotations carry no gauge vector, so their currents use A = 0.
    let zero_gauge = vec![Expr::zero(); m.dim()];
    for name in ["K1", "K2", "K3"] {
        let f = entry.field(name).expect("builtin entry has the rotations");
        let current = lag.noether_current(&f.field, &zero_gauge);
        println!("\ncurrent of {name}:");
        for (coord, component) in m.coords.iter().zip(&current) {
            println!("  J^{coord} = {component}");
        }
        let divergence = substitute_many(&lag.current_divergence(&f.field, &zero_gauge), &on_shell);
        match is_zero(&divergence, &scfg, &m.singular)? {
            ZeroVerdict::Zero => println!("  on-shell divergence: identically zero"),
            other => println!("  unexpected divergence verdict: {other:?}"),
        }
    }
    Ok(())
}
