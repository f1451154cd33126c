//! TOML metric file format.
//!
//! A metric file declares a split metric, an optional volume potential,
//! optional derivative rules for opaque functions, and a list of candidate
//! fields that may carry expected verdicts and gauges as golden fixtures.
//! The builtin catalogue entries are stored in exactly this format, so every
//! construct a user file can express is exercised on every run.
//!
//! ```toml
//! name = "my-metric"
//! u = "r"
//! coords = ["theta", "phi"]
//! signature = "riemannian"          # or "lorentzian"
//! h = [["r^2", "0"], ["0", "r^2*sin(theta)^2"]]
//! volume = "1/3*r^3*sin(theta)"     # optional; derived from sqrt|h| when absent
//! singular = ["sin(theta)"]         # optional sampling exclusions
//!
//! [boxes]                           # optional sampling ranges
//! theta = [0.1, 1.4]                # interval
//! q = { two_sided = [0.1, 1.0] }    # magnitude range, either sign
//!
//! [rules]                           # optional derivative closures
//! W = { arg = "r", derivative = "exp(r)" }
//!
//! [[fields]]
//! name = "K"
//! eta = "0"                         # optional, defaults to 0
//! xi = ["sin(phi)", "cos(theta)/sin(theta)*cos(phi)"]
//! expected_verdict = "noether"      # optional fixture
//! expected_gauge = ["0", "0"]       # optional fixture
//! ```

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::geometry::{Signature, SplitMetric, VectorField};
use crate::noether::Verdict;
use crate::sample::Range;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricDoc {
    name: String,
    #[serde(default)]
    description: Option<String>,
    u: String,
    coords: Vec<String>,
    signature: String,
    h: Vec<Vec<String>>,
    #[serde(default)]
    volume: Option<String>,
    #[serde(default)]
    singular: Vec<String>,
    #[serde(default)]
    note: Option<String>,
    #[serde(default)]
    boxes: BTreeMap<String, BoxSpec>,
    #[serde(default)]
    rules: BTreeMap<String, RuleSpec>,
    #[serde(default)]
    fields: Vec<FieldDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BoxSpec {
    Interval([f64; 2]),
    TwoSided { two_sided: [f64; 2] },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleSpec {
    arg: String,
    derivative: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    name: String,
    #[serde(default)]
    eta: Option<String>,
    xi: Vec<String>,
    #[serde(default)]
    expected_verdict: Option<String>,
    #[serde(default)]
    expected_gauge: Option<Vec<String>>,
}

/// Golden fixture for one field, recorded for the symbolic-multiplier run.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub verdict: Verdict,
    /// Expected gauge components; present only for constructed gauges.
    pub gauge: Option<Vec<Expr>>,
}

#[derive(Debug, Clone)]
pub struct CatalogueField {
    pub field: VectorField,
    pub fixture: Option<Fixture>,
}

#[derive(Debug, Clone)]
pub struct CatalogueEntry {
    pub metric: SplitMetric,
    pub description: String,
    pub note: String,
    /// Declared volume potential, if any; validated on Lagrangian assembly.
    pub volume: Option<Expr>,
    pub fields: Vec<CatalogueField>,
}

impl CatalogueEntry {
    pub fn field(&self, name: &str) -> Option<&CatalogueField> {
        self.fields.iter().find(|f| f.field.name == name)
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.field.name.as_str()).collect()
    }

    pub fn has_fixtures(&self) -> bool {
        self.fields.iter().any(|f| f.fixture.is_some())
    }
}

fn parse_in(src: &str, what: &str) -> Result<Expr> {
    parse(src).map_err(|e| match e {
        Error::ParseError { line, col, msg } => Error::ParseError {
            line,
            col,
            msg: format!("in {what}: {msg}"),
        },
        other => other,
    })
}

/// Parse and validate a metric document.
pub fn entry_from_str(text: &str) -> Result<CatalogueEntry> {
    let doc: MetricDoc = toml::from_str(text).map_err(|e| {
        let (line, col) = e
            .span()
            .map(|s| position_of(text, s.start))
            .unwrap_or((1, 1));
        Error::ParseError {
            line,
            col,
            msg: format!("metric file: {}", e.message()),
        }
    })?;

    if doc.name.is_empty() {
        return Err(Error::ValidationError("metric name must be nonempty".into()));
    }
    let n = doc.coords.len();
    if n == 0 {
        return Err(Error::ValidationError(
            "at least one slice coordinate is required".into(),
        ));
    }
    if doc.coords.iter().any(|c| c == &doc.u) {
        return Err(Error::ValidationError(format!(
            "distinguished coordinate {} also appears in coords",
            doc.u
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for c in &doc.coords {
        if !seen.insert(c.clone()) {
            return Err(Error::ValidationError(format!("duplicate coordinate {c}")));
        }
    }

    let signature = match doc.signature.as_str() {
        "riemannian" => Signature::Riemannian,
        "lorentzian" => Signature::Lorentzian,
        other => {
            return Err(Error::ValidationError(format!(
                "signature must be \"riemannian\" or \"lorentzian\", got \"{other}\""
            )))
        }
    };

    if doc.h.len() != n || doc.h.iter().any(|row| row.len() != n) {
        return Err(Error::ValidationError(format!(
            "h must be a {n}x{n} matrix to match coords"
        )));
    }
    let mut h = Vec::with_capacity(n);
    for (i, row) in doc.h.iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (j, cell) in row.iter().enumerate() {
            out.push(parse_in(cell, &format!("h[{i}][{j}]"))?);
        }
        h.push(out);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if h[i][j] != h[j][i] {
                return Err(Error::ValidationError(format!(
                    "h must be symmetric: h[{i}][{j}] differs from h[{j}][{i}]"
                )));
            }
        }
    }

    let volume = doc
        .volume
        .as_deref()
        .map(|v| parse_in(v, "volume"))
        .transpose()?;

    let mut singular = Vec::with_capacity(doc.singular.len());
    for (i, s) in doc.singular.iter().enumerate() {
        singular.push(parse_in(s, &format!("singular[{i}]"))?);
    }

    let mut boxes = BTreeMap::new();
    for (name, spec) in doc.boxes {
        let range = match spec {
            BoxSpec::Interval([lo, hi]) => Range::Interval(lo, hi),
            BoxSpec::TwoSided { two_sided: [lo, hi] } => Range::TwoSided(lo, hi),
        };
        let (lo, hi) = match range {
            Range::Interval(lo, hi) | Range::TwoSided(lo, hi) => (lo, hi),
        };
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::ValidationError(format!(
                "box for {name} must satisfy lo < hi with finite bounds"
            )));
        }
        boxes.insert(name, range);
    }

    let mut rules = BTreeMap::new();
    for (name, spec) in doc.rules {
        let deriv = parse_in(&spec.derivative, &format!("rules.{name}"))?;
        rules.insert(name, (spec.arg, deriv));
    }

    let metric = SplitMetric {
        name: doc.name,
        u: doc.u,
        coords: doc.coords,
        h,
        signature,
        singular,
        rules,
        boxes,
    };

    let mut fields = Vec::with_capacity(doc.fields.len());
    let mut field_names = std::collections::BTreeSet::new();
    for fd in doc.fields {
        if !field_names.insert(fd.name.clone()) {
            return Err(Error::ValidationError(format!(
                "duplicate field name {}",
                fd.name
            )));
        }
        if fd.xi.len() != n {
            return Err(Error::ValidationError(format!(
                "field {}: xi must have one component per slice coordinate",
                fd.name
            )));
        }
        let eta = match &fd.eta {
            Some(src) => parse_in(src, &format!("fields.{}.eta", fd.name))?,
            None => Expr::zero(),
        };
        let mut xi = Vec::with_capacity(n);
        for (k, src) in fd.xi.iter().enumerate() {
            xi.push(parse_in(src, &format!("fields.{}.xi[{k}]", fd.name))?);
        }

        let verdict = match fd.expected_verdict.as_deref() {
            None => None,
            Some("noether") => Some(Verdict::Noether),
            Some("not-noether") => Some(Verdict::NotNoether),
            Some(other) => {
                return Err(Error::ValidationError(format!(
                    "field {}: expected_verdict must be \"noether\" or \"not-noether\", got \"{other}\"",
                    fd.name
                )))
            }
        };
        let gauge = match &fd.expected_gauge {
            None => None,
            Some(parts) => {
                if parts.len() != n {
                    return Err(Error::ValidationError(format!(
                        "field {}: expected_gauge must have one component per slice coordinate",
                        fd.name
                    )));
                }
                let mut out = Vec::with_capacity(n);
                for (k, src) in parts.iter().enumerate() {
                    out.push(parse_in(src, &format!("fields.{}.expected_gauge[{k}]", fd.name))?);
                }
                Some(out)
            }
        };
        if gauge.is_some() && verdict != Some(Verdict::Noether) {
            return Err(Error::ValidationError(format!(
                "field {}: expected_gauge requires expected_verdict = \"noether\"",
                fd.name
            )));
        }
        let fixture = verdict.map(|verdict| Fixture {
            verdict,
            gauge: gauge.clone(),
        });

        fields.push(CatalogueField {
            field: VectorField { name: fd.name, eta, xi },
            fixture,
        });
    }

    Ok(CatalogueEntry {
        metric,
        description: doc.description.unwrap_or_default(),
        note: doc.note.unwrap_or_default(),
        volume,
        fields,
    })
}

fn position_of(text: &str, byte: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in text.char_indices() {
        if i >= byte {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}
