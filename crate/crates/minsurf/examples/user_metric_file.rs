//! Author a metric file from scratch, load it, and run the full decision
//! procedure on its fields: the same TOML format the builtin catalogue
//! uses, so anything here can also be dropped into the directory named by
//! MINSURF_CATALOGUE_DIR to become a first-class catalogue entry.
//!
//! The metric is a flat slab sliced by parallel planes. Translations along
//! the slab survive the volume constraint; a shear is not an isometry at
//! all and is refused with a witness.

use minsurf::catalogue;
use minsurf::noether::{build_lagrangian, check_noether, Lambda};
use minsurf::sample::SampleConfig;

const SLAB: &str = r#"
name = "slab"
description = "flat slab sliced by parallel planes"
u = "w"
coords = ["x", "y"]
signature = "riemannian"
h = [
    ["1", "0"],
    ["0", "1"],
]
volume = "w"

[[fields]]
name = "Tx"
xi = ["1", "0"]
expected_verdict = "noether"
expected_gauge = ["0", "0"]

[[fields]]
name = "rot"
xi = ["-y", "x"]
expected_verdict = "noether"
expected_gauge = ["0", "0"]

[[fields]]
name = "shear"
xi = ["y", "0"]
expected_verdict = "not-noether"
"#;

fn main() -> minsurf::Result<()> {
    let dir = std::env::temp_dir();
    let path = dir.join("slab-metric.toml");
    std::fs::write(&path, SLAB).expect("temp dir is writable");

    let entry = catalogue::load_file(&path)?;
    println!("loaded {} from {}", entry.metric.name, path.display());

    let cfg = SampleConfig::default();
    let lag = build_lagrangian(
        entry.metric.clone(),
        Lambda::Symbolic,
        entry.volume.clone(),
        &cfg,
    )?;
    for f in &entry.fields {
        let analysis = check_noether(&lag, &f.field, &cfg)?;
        println!("  {:5} -> {}", f.field.name, analysis.verdict);
        if let Some(fx) = &f.fixture {
            let mismatches = catalogue::fixture_mismatches(fx, &analysis, &lag, &cfg)?;
            if mismatches.is_empty() {
                println!("        fixture reproduces");
            } else {
                for m in mismatches {
                    println!("        fixture mismatch: {m}");
                }
            }
        }
    }
    Ok(())
}
