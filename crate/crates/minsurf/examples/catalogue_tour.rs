//! Walk the builtin metric catalogue: list every entry, then open one and
//! look at its fields and golden fixtures.
//!
//! Entries live in the same TOML format users write (see the
//! `user_metric_file` example), and the directory named by the
//! `MINSURF_CATALOGUE_DIR` environment variable can extend or shadow them.

use minsurf::catalogue;

fn main() -> minsurf::Result<()> {
    println!("builtin catalogue:");
    for entry in catalogue::list(None)? {
        println!(
            "  {:22} {} fields ({} with fixtures)",
            entry.name, entry.fields, entry.fixtures
        );
        println!("  {:22} {}", "", entry.description);
    }

    let entry = catalogue::load("frw", None)?;
    println!("\nfrw in detail:");
    println!("  graph variable: {}", entry.metric.u);
    println!("  slice coordinates: {}", entry.metric.coords.join(", "));
    match &entry.volume {
        Some(v) => println!("  volume potential: {v}"),
        None => println!("  volume potential: derived on demand"),
    }
    for f in &entry.fields {
        let expected = f
            .fixture
            .as_ref()
            .map(|fx| format!("expected {}", fx.verdict))
            .unwrap_or_else(|| "no fixture".to_string());
        println!(
            "  field {:4} eta = {}, xi = [{}]  ({expected})",
            f.field.name,
            f.field.eta,
            f.field
                .xi
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(())
}
