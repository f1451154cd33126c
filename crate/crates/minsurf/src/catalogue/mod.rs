//! Metric catalogue: the builtin entries, directory extension, and golden
//! fixture checks.
//!
//! Builtins are embedded TOML documents in the same file format users write
//! (see [`format`]). A directory named through [`CATALOGUE_DIR_ENV`] or an
//! explicit path extends the catalogue; a file entry whose `name` matches a
//! builtin shadows it.

pub mod format;

pub use format::{CatalogueEntry, CatalogueField, Fixture};

use crate::error::{Error, Result};
use crate::expr::{is_zero, Expr, ZeroVerdict};
use crate::noether::{GaugeOutcome, MinSurfLagrangian, NoetherAnalysis, Verdict};
use crate::sample::SampleConfig;
use std::path::{Path, PathBuf};

/// Environment variable naming a directory of extra `.toml` metric files.
pub const CATALOGUE_DIR_ENV: &str = "MINSURF_CATALOGUE_DIR";

/// Builtin entry names, in catalogue order.
pub const BUILTIN_NAMES: [&str; 5] = [
    "euclidean3-spherical",
    "sphere3",
    "static-spherical",
    "frw",
    "frw-dust",
];

const BUILTIN_SOURCES: [(&str, &str); 5] = [
    (
        "euclidean3-spherical",
        include_str!("data/euclidean3-spherical.toml"),
    ),
    ("sphere3", include_str!("data/sphere3.toml")),
    ("static-spherical", include_str!("data/static-spherical.toml")),
    ("frw", include_str!("data/frw.toml")),
    ("frw-dust", include_str!("data/frw-dust.toml")),
];

/// Load a builtin entry by name.
pub fn builtin(name: &str) -> Option<CatalogueEntry> {
    BUILTIN_SOURCES.iter().find(|(n, _)| *n == name).map(|(n, text)| {
        format::entry_from_str(text)
            .unwrap_or_else(|e| panic!("builtin catalogue entry {n} is well-formed: {e}"))
    })
}

/// The catalogue directory named by the environment, if set and nonempty.
pub fn dir_from_env() -> Option<PathBuf> {
    match std::env::var(CATALOGUE_DIR_ENV) {
        Ok(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => None,
    }
}

/// Where a catalogue entry came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntrySource {
    Builtin,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct EntrySummary {
    pub name: String,
    pub description: String,
    pub fields: usize,
    pub fixtures: usize,
    pub source: EntrySource,
}

fn summarize(entry: &CatalogueEntry, source: EntrySource) -> EntrySummary {
    EntrySummary {
        name: entry.metric.name.clone(),
        description: entry.description.clone(),
        fields: entry.fields.len(),
        fixtures: entry.fields.iter().filter(|f| f.fixture.is_some()).count(),
        source,
    }
}

fn dir_entries(dir: &Path) -> Result<Vec<(PathBuf, CatalogueEntry)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::ValidationError(format!("catalogue dir {}: {e}", dir.display())))?
        .filter_map(|r| r.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    paths.sort();

    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::ValidationError(format!("{}: {e}", path.display())))?;
        let entry = format::entry_from_str(&text).map_err(|err| match err {
            Error::ParseError { line, col, msg } => Error::ParseError {
                line,
                col,
                msg: format!("{}: {msg}", path.display()),
            },
            Error::ValidationError(msg) => {
                Error::ValidationError(format!("{}: {msg}", path.display()))
            }
            other => other,
        })?;
        out.push((path, entry));
    }
    Ok(out)
}

/// All available entries: builtins in catalogue order, then directory
/// entries sorted by file name. A directory entry sharing a builtin's name
/// replaces it in place.
pub fn list(dir: Option<&Path>) -> Result<Vec<EntrySummary>> {
    let mut out: Vec<EntrySummary> = BUILTIN_NAMES
        .iter()
        .map(|n| summarize(&builtin(n).unwrap(), EntrySource::Builtin))
        .collect();
    if let Some(dir) = dir {
        for (path, entry) in dir_entries(dir)? {
            let summary = summarize(&entry, EntrySource::File(path));
            match out.iter_mut().find(|s| s.name == summary.name) {
                Some(slot) => *slot = summary,
                None => out.push(summary),
            }
        }
    }
    Ok(out)
}

/// Load an entry by name, directory entries shadowing builtins.
pub fn load(name: &str, dir: Option<&Path>) -> Result<CatalogueEntry> {
    if let Some(dir) = dir {
        for (_, entry) in dir_entries(dir)? {
            if entry.metric.name == name {
                return Ok(entry);
            }
        }
    }
    builtin(name).ok_or_else(|| Error::UnknownMetric(name.to_string()))
}

/// Load a metric file directly, bypassing the catalogue.
pub fn load_file(path: &Path) -> Result<CatalogueEntry> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ValidationError(format!("{}: {e}", path.display())))?;
    format::entry_from_str(&text)
}

/// Compare one analysis against its fixture. Returns human-readable
/// mismatch descriptions; empty means the fixture reproduces. Fixtures are
/// recorded for the symbolic-multiplier run, so callers should only invoke
/// this when the analysis was made with `Lambda::Symbolic`.
pub fn fixture_mismatches(
    fixture: &Fixture,
    analysis: &NoetherAnalysis,
    lag: &MinSurfLagrangian,
    cfg: &SampleConfig,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if analysis.verdict != fixture.verdict {
        out.push(format!(
            "verdict: expected {}, got {}",
            fixture.verdict, analysis.verdict
        ));
        return Ok(out);
    }
    if let Some(expected) = &fixture.gauge {
        let constructed: &[Expr] = match &analysis.gauge {
            Some(GaugeOutcome::Constructed { a, .. }) => a,
            _ => {
                out.push("gauge: fixture has components but none were constructed".into());
                return Ok(out);
            }
        };
        let m = &lag.metric;
        let scfg = m.sampling(cfg);
        for (k, (got, want)) in constructed.iter().zip(expected).enumerate() {
            let delta = Expr::sub(got.clone(), want.clone());
            match is_zero(&delta, &scfg, &m.singular)? {
                ZeroVerdict::Zero => {}
                verdict => out.push(format!(
                    "gauge[{}]: constructed {} differs from fixture {} ({verdict:?})",
                    m.coords[k], got, want
                )),
            }
        }
    } else if fixture.verdict == Verdict::Noether {
        // Fixture pins only the verdict; nothing further to compare.
    }
    Ok(out)
}
