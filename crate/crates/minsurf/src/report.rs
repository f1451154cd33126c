//! Report documents emitted by the command-line front end.
//!
//! Structured output is a versioned contract: any change to the shape of
//! these documents bumps [`SCHEMA_VERSION`] so downstream fixtures break
//! loudly instead of drifting. Rendering never consults the process locale;
//! all floats go through Rust's own formatter, which always writes `.` and
//! ASCII digits.

use std::io::{self, Write};

use serde::Serialize;

use crate::catalogue::{EntrySource, EntrySummary};
use crate::geometry::Signature;
use crate::integrate::{OdeSolution, Termination};
use crate::noether::{GaugeOutcome, NoetherAnalysis};
use crate::reduction::{Proportionality, ReducedProblem};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

/// A report that can render itself in both output formats.
pub trait Document: Serialize {
    fn text(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Structured => {
                let mut s =
                    serde_json::to_string_pretty(self).expect("report documents serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Residual magnitudes in text output: fixed mantissa, deterministic.
fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

#[derive(Debug, Serialize)]
pub struct ConditionReport {
    pub label: String,
    pub satisfied: bool,
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct FixtureReport {
    pub matches: bool,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct FieldReport {
    pub name: String,
    pub verdict: String,
    pub killing: bool,
    pub killing_residual: f64,
    /// Constructed gauge components, one per slice coordinate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Vec<String>>,
    /// Why no gauge exists, when construction was attempted and refused.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
    pub conditions: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureReport>,
}

impl FieldReport {
    pub fn from_analysis(analysis: &NoetherAnalysis, mismatches: Option<Vec<String>>) -> Self {
        let (gauge, obstruction) = match &analysis.gauge {
            Some(GaugeOutcome::Constructed { a, .. }) => {
                (Some(a.iter().map(|c| c.to_string()).collect()), None)
            }
            Some(GaugeOutcome::NoSolution { reason, .. }) => (None, Some(reason.clone())),
            None => (None, None),
        };
        FieldReport {
            name: analysis.field.clone(),
            verdict: analysis.verdict.to_string(),
            killing: analysis.killing.is_killing,
            killing_residual: analysis.killing.max_residual,
            gauge,
            obstruction,
            conditions: analysis
                .conditions
                .entries
                .iter()
                .map(|e| ConditionReport {
                    label: e.label.to_string(),
                    satisfied: e.verdict.is_zero(),
                    max_residual: e.max_residual,
                })
                .collect(),
            fixture: mismatches.map(|m| FixtureReport {
                matches: m.is_empty(),
                mismatches: m,
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub metric: String,
    /// `"symbolic"` or the fixed numeric value the run used.
    pub lambda: String,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// Sorted by field name; assembly order never depends on scheduling.
    pub fields: Vec<FieldReport>,
}

impl CheckReport {
    /// Count of fields whose golden fixture failed to reproduce.
    pub fn fixture_failures(&self) -> usize {
        self.fields
            .iter()
            .filter(|f| f.fixture.as_ref().is_some_and(|fx| !fx.matches))
            .count()
    }
}

impl Document for CheckReport {
    fn text(&self) -> String {
        let mut out = format!(
            "check {}  (lambda = {}, seed {}, samples {}, tol {:e})\n",
            self.metric, self.lambda, self.seed, self.samples, self.tol
        );
        for f in &self.fields {
            out.push_str(&format!("\n{}: {}\n", f.name, f.verdict));
            out.push_str(&format!(
                "  killing: {}  (max residual {})\n",
                if f.killing { "yes" } else { "no" },
                sci(f.killing_residual)
            ));
            if let Some(gauge) = &f.gauge {
                out.push_str(&format!("  gauge: [{}]\n", gauge.join(", ")));
            }
            if let Some(reason) = &f.obstruction {
                out.push_str(&format!("  no gauge: {reason}\n"));
            }
            for c in &f.conditions {
                out.push_str(&format!(
                    "  condition {}: {}  ({})\n",
                    c.label,
                    if c.satisfied { "holds" } else { "fails" },
                    sci(c.max_residual)
                ));
            }
            if let Some(fx) = &f.fixture {
                if fx.matches {
                    out.push_str("  fixture: match\n");
                } else {
                    out.push_str("  fixture: MISMATCH\n");
                    for m in &fx.mismatches {
                        out.push_str(&format!("    {m}\n"));
                    }
                }
            }
        }
        let noether = self.fields.iter().filter(|f| f.verdict == "noether").count();
        let not = self
            .fields
            .iter()
            .filter(|f| f.verdict == "not-noether")
            .count();
        let other = self.fields.len() - noether - not;
        out.push_str(&format!(
            "\nsummary: {noether} noether, {not} not-noether, {other} inconclusive"
        ));
        let checked = self.fields.iter().filter(|f| f.fixture.is_some()).count();
        if checked > 0 {
            out.push_str(&format!(
                "; fixtures: {}/{checked} match",
                checked - self.fixture_failures()
            ));
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub proportional: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&Proportionality> for VerifyReport {
    fn from(p: &Proportionality) -> Self {
        match p {
            Proportionality::Proportional { factor } => VerifyReport {
                proportional: true,
                factor: Some(*factor),
                reason: None,
            },
            Proportionality::NotProportional { reason } => VerifyReport {
                proportional: false,
                factor: None,
                reason: Some(reason.clone()),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TraceReport {
    pub path: String,
    pub rows: usize,
    pub x_end: f64,
    pub s_end: f64,
    pub sp_end: f64,
    pub max_residual: f64,
    /// `"completed"`, or `"domain exit at x=..., <reason>"` for partial runs.
    pub termination: String,
}

impl TraceReport {
    pub fn from_solution(path: &str, sol: &OdeSolution) -> Self {
        let n = sol.xs.len();
        TraceReport {
            path: path.to_string(),
            rows: n,
            x_end: sol.xs[n - 1],
            s_end: sol.ss[n - 1],
            sp_end: sol.sps[n - 1],
            max_residual: sol.max_residual,
            termination: match &sol.termination {
                Termination::Completed => "completed".to_string(),
                Termination::DomainExit { at, reason } => {
                    format!("domain exit at x={at:.6e}, {reason}")
                }
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReduceReport {
    pub schema_version: u32,
    pub metric: String,
    pub lambda: String,
    /// Eliminated slice coordinates, in the order requested.
    pub by: Vec<String>,
    /// Original names behind the canonical `x` and `s(x)`.
    pub surviving: String,
    pub dependent: String,
    pub ode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceReport>,
}

impl ReduceReport {
    pub fn new(metric: &str, lambda: String, red: &ReducedProblem) -> Self {
        ReduceReport {
            schema_version: SCHEMA_VERSION,
            metric: metric.to_string(),
            lambda,
            by: red.eliminated.clone(),
            surviving: red.surviving.clone(),
            dependent: red.dependent.clone(),
            ode: red.ode.to_string(),
            verification: None,
            trace: None,
        }
    }
}

impl Document for ReduceReport {
    fn text(&self) -> String {
        let mut out = format!(
            "reduce {}  (lambda = {}, eliminated {})\n",
            self.metric,
            self.lambda,
            self.by.join(", ")
        );
        out.push_str(&format!(
            "profile variables: s = {}, x = {}\n",
            self.dependent, self.surviving
        ));
        out.push_str(&format!("reduced equation: {} = 0\n", self.ode));
        if let Some(v) = &self.verification {
            if v.proportional {
                out.push_str(&format!(
                    "reference form: proportional, factor {:.9}\n",
                    v.factor.expect("proportional verdict carries its factor")
                ));
            } else {
                out.push_str(&format!(
                    "reference form: NOT proportional ({})\n",
                    v.reason.as_deref().unwrap_or("no reason recorded")
                ));
            }
        }
        if let Some(t) = &self.trace {
            out.push_str(&format!(
                "trace: {} rows -> {}  ({})\n",
                t.rows, t.path, t.termination
            ));
            out.push_str(&format!(
                "  end point: x = {:.9}, s = {:.9}, s' = {:.9}\n",
                t.x_end, t.s_end, t.sp_end
            ));
            out.push_str(&format!("  max |residual| = {}\n", sci(t.max_residual)));
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct ListEntryReport {
    pub name: String,
    pub description: String,
    pub fields: usize,
    pub fixtures: usize,
    pub source: String,
}

#[derive(Debug, Serialize)]
pub struct ListReport {
    pub schema_version: u32,
    pub entries: Vec<ListEntryReport>,
}

impl ListReport {
    pub fn new(entries: &[EntrySummary]) -> Self {
        ListReport {
            schema_version: SCHEMA_VERSION,
            entries: entries
                .iter()
                .map(|e| ListEntryReport {
                    name: e.name.clone(),
                    description: e.description.clone(),
                    fields: e.fields,
                    fixtures: e.fixtures,
                    source: match &e.source {
                        EntrySource::Builtin => "builtin".to_string(),
                        EntrySource::File(p) => p.display().to_string(),
                    },
                })
                .collect(),
        }
    }
}

impl Document for ListReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{}  [{} fields, {} fixtures, {}]\n    {}\n",
                e.name, e.fields, e.fixtures, e.source, e.description
            ));
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct MetricFieldReport {
    pub name: String,
    pub eta: String,
    pub xi: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_verdict: Option<String>,
}

/// Detail view for one catalogue entry (`list --metric NAME`).
#[derive(Debug, Serialize)]
pub struct MetricReport {
    pub schema_version: u32,
    pub name: String,
    pub description: String,
    pub signature: String,
    pub u: String,
    pub coords: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<String>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub fields: Vec<MetricFieldReport>,
}

impl MetricReport {
    pub fn new(entry: &crate::catalogue::CatalogueEntry) -> Self {
        MetricReport {
            schema_version: SCHEMA_VERSION,
            name: entry.metric.name.clone(),
            description: entry.description.clone(),
            signature: match entry.metric.signature {
                Signature::Riemannian => "riemannian".to_string(),
                Signature::Lorentzian => "lorentzian".to_string(),
            },
            u: entry.metric.u.clone(),
            coords: entry.metric.coords.clone(),
            volume: entry.volume.as_ref().map(|v| v.to_string()),
            note: entry.note.clone(),
            fields: entry
                .fields
                .iter()
                .map(|f| MetricFieldReport {
                    name: f.field.name.clone(),
                    eta: f.field.eta.to_string(),
                    xi: f.field.xi.iter().map(|c| c.to_string()).collect(),
                    expected_verdict: f.fixture.as_ref().map(|fx| fx.verdict.to_string()),
                })
                .collect(),
        }
    }
}

impl Document for MetricReport {
    fn text(&self) -> String {
        let mut out = format!("{}  ({})\n{}\n", self.name, self.signature, self.description);
        out.push_str(&format!(
            "graph variable: {}; slice coordinates: {}\n",
            self.u,
            self.coords.join(", ")
        ));
        if let Some(v) = &self.volume {
            out.push_str(&format!("volume potential: {v}\n"));
        }
        if !self.note.is_empty() {
            out.push_str(&format!("note: {}\n", self.note));
        }
        out.push_str("fields:\n");
        for f in &self.fields {
            out.push_str(&format!(
                "  {}: eta = {}, xi = [{}]",
                f.name,
                f.eta,
                f.xi.join(", ")
            ));
            if let Some(v) = &f.expected_verdict {
                out.push_str(&format!("  (expected {v})"));
            }
            out.push('\n');
        }
        out
    }
}

/// Write a solution trace as delimited text: a header line, then one row
/// per grid node. Rows where the finite-difference residual is unavailable
/// (fewer than five nodes survive a domain exit) carry `nan` in the last
/// column so row count always matches the grid.
pub fn write_trace(w: &mut impl Write, sol: &OdeSolution) -> io::Result<()> {
    writeln!(w, "x s s' residual")?;
    for i in 0..sol.xs.len() {
        let residual = sol
            .residuals
            .get(i)
            .map(|r| format!("{r:.12e}"))
            .unwrap_or_else(|| "nan".to_string());
        writeln!(
            w,
            "{:.12e} {:.12e} {:.12e} {residual}",
            sol.xs[i], sol.ss[i], sol.sps[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::OdeOptions;

    fn sample_check_report() -> CheckReport {
        CheckReport {
            schema_version: SCHEMA_VERSION,
            metric: "frw".into(),
            lambda: "symbolic".into(),
            seed: 424242,
            samples: 100,
            tol: 1e-9,
            fields: vec![FieldReport {
                name: "Tx".into(),
                verdict: "noether".into(),
                killing: true,
                killing_residual: 3.2e-13,
                gauge: Some(vec!["0".into(), "0".into(), "0".into()]),
                obstruction: None,
                conditions: vec![ConditionReport {
                    label: "metric0".into(),
                    satisfied: true,
                    max_residual: 1.1e-14,
                }],
                fixture: Some(FixtureReport {
                    matches: true,
                    mismatches: vec![],
                }),
            }],
        }
    }

    #[test]
    fn structured_rendering_is_stable() {
        let r = sample_check_report();
        let a = r.render(Format::Structured);
        let b = r.render(Format::Structured);
        assert_eq!(a, b);
        assert!(a.contains("\"schema_version\": 1"));
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn text_rendering_names_the_verdict_and_fixture() {
        let r = sample_check_report();
        let t = r.text();
        assert!(t.contains("Tx: noether"));
        assert!(t.contains("fixture: match"));
        assert!(t.contains("summary: 1 noether, 0 not-noether, 0 inconclusive"));
        assert!(t.contains("fixtures: 1/1 match"));
    }

    #[test]
    fn mismatches_count_as_fixture_failures() {
        let mut r = sample_check_report();
        r.fields[0].fixture = Some(FixtureReport {
            matches: false,
            mismatches: vec!["verdict: expected noether, got not-noether".into()],
        });
        assert_eq!(r.fixture_failures(), 1);
        assert!(r.text().contains("fixture: MISMATCH"));
    }

    #[test]
    fn trace_format_is_header_plus_rows() {
        let ode = crate::expr::parse("s_xx + s").unwrap();
        let sol =
            crate::integrate::integrate(&ode, 0.0, (0.0, 1.0, 0.0), 1.0, &OdeOptions::default())
                .unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &sol).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x s s' residual");
        assert_eq!(lines.len(), 1 + sol.xs.len());
        for row in &lines[1..] {
            assert_eq!(row.split(' ').count(), 4);
        }
        // Locale-independent scientific notation: digits, '.', 'e', '-'.
        assert!(lines[1].chars().all(|c| c.is_ascii_digit()
            || c == '.'
            || c == 'e'
            || c == '-'
            || c == ' '));
    }

    #[test]
    fn short_traces_pad_the_residual_column() {
        let ode = crate::expr::parse("s_xx + s").unwrap();
        let sol = crate::integrate::integrate(&ode, 0.0, (0.0, 1.0, 0.0), 1.0, &OdeOptions::default())
            .unwrap();
        let mut clipped = sol;
        clipped.residuals.clear();
        let mut buf = Vec::new();
        write_trace(&mut buf, &clipped).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(" nan"));
    }
}
