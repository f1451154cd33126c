//! Command-line front end: argument grammar, dispatch, and the exit-code
//! contract (0 ok, 2 parse, 3 validation, 4 fixture or reference mismatch,
//! 5 engine, 6 reduction or incomplete trace).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::catalogue::{self, CatalogueEntry, CatalogueField, CATALOGUE_DIR_ENV};
use crate::error::{Error, Result};
use crate::expr;
use crate::integrate::{integrate, OdeOptions, Termination};
use crate::noether::{build_lagrangian, check_noether, Lambda};
use crate::reduction::{
    compare_up_to_factor, dust_reference_ode, normalize_for_comparison, reduce, translation_field,
    Proportionality, REDUCED_DEP,
};
use crate::report::{
    self, CheckReport, Document, FieldReport, Format, ListReport, MetricReport, ReduceReport,
    TraceReport, VerifyReport, SCHEMA_VERSION,
};
use crate::sample::{SampleConfig, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "minsurf",
    version,
    about = "Killing and Noether symmetry checks, gauge construction, and \
             symmetry reduction for volume-constrained minimal-surface \
             problems on split metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the symmetry decision procedure over a metric's fields.
    Check(CheckArgs),
    /// Reduce the graph equation along commuting translations; optionally
    /// integrate the resulting profile equation.
    Reduce(ReduceArgs),
    /// List catalogue entries, or show one entry in detail.
    List(ListArgs),
}

#[derive(Args)]
struct MetricSource {
    /// Catalogue entry to load (same as --metric).
    #[arg(value_name = "METRIC", conflicts_with_all = ["metric", "file"])]
    name: Option<String>,

    /// Catalogue entry to load.
    #[arg(long, conflicts_with = "file")]
    metric: Option<String>,

    /// Metric file to load instead of a catalogue entry.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

impl MetricSource {
    fn resolve(&self) -> Result<CatalogueEntry> {
        match (self.name.as_ref().or(self.metric.as_ref()), &self.file) {
            (Some(name), None) => {
                catalogue::load(name, catalogue::dir_from_env().as_deref())
            }
            (None, Some(path)) => catalogue::load_file(path),
            (None, None) => Err(Error::ValidationError(format!(
                "no metric given; name a catalogue entry or pass --file \
                 (extension directory: ${CATALOGUE_DIR_ENV})"
            ))),
            (Some(_), Some(_)) => unreachable!("clap conflict rules prevent this"),
        }
    }
}

#[derive(Args)]
struct SamplingArgs {
    /// Sampling seed; the fixed default makes repeated runs byte-identical.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Sample count per identity test.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,

    /// Scale-relative acceptance tolerance for residuals.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

impl SamplingArgs {
    fn config(&self) -> Result<SampleConfig> {
        if self.samples == 0 {
            return Err(Error::ValidationError("--samples must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::ValidationError(format!(
                "--tol must be a positive finite number, got {}",
                self.tol
            )));
        }
        Ok(SampleConfig {
            n: self.samples,
            tol: self.tol,
            seed: self.seed,
            ..SampleConfig::default()
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-readable report.
    Text,
    /// Versioned JSON document; stable across runs with the same seed.
    Structured,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Structured => Format::Structured,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Write the report to this path instead of stdout. For `reduce
    /// --integrate` this names the trace file (default trace.txt) and the
    /// report stays on stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: MetricSource,

    /// Comma-separated field names, or "all".
    #[arg(long, default_value = "all")]
    fields: String,

    /// "symbolic" for the strongest verdicts, or a numeric value.
    #[arg(long, default_value = "symbolic")]
    lambda: String,

    #[command(flatten)]
    sampling: SamplingArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    source: MetricSource,

    /// Comma-separated slice coordinates to eliminate.
    #[arg(long, value_name = "COORDS")]
    by: String,

    /// "symbolic", or a numeric value (required by --integrate).
    #[arg(long, default_value = "symbolic")]
    lambda: String,

    /// Check the reduced equation against the published reference form of
    /// the dust-era profile equation and report the proportionality factor.
    #[arg(long)]
    verify_paper: bool,

    /// March the profile equation from (s0, s'0) at x = 0 and write a
    /// trace file.
    #[arg(long)]
    integrate: bool,

    /// Initial profile value s(0); must be positive.
    #[arg(long, default_value_t = 1.0)]
    s0: f64,

    /// Initial slope s'(0).
    #[arg(long, default_value_t = 0.0)]
    sp0: f64,

    /// Length of the integration interval.
    #[arg(long, default_value_t = 0.25)]
    span: f64,

    #[command(flatten)]
    sampling: SamplingArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ListArgs {
    /// Show this catalogue entry in detail instead of the overview.
    #[arg(long)]
    metric: Option<String>,

    /// Show a metric file in detail.
    #[arg(long, value_name = "PATH", conflicts_with = "metric")]
    file: Option<PathBuf>,

    #[command(flatten)]
    output: OutputArgs,
}

fn parse_lambda(s: &str) -> Result<Lambda> {
    if s == "symbolic" {
        return Ok(Lambda::Symbolic);
    }
    expr::rat_from_decimal(s).map(Lambda::Fixed).map_err(|_| {
        Error::ValidationError(format!(
            "--lambda must be \"symbolic\" or a rational constant, got `{s}`"
        ))
    })
}

fn lambda_label(lambda: &Lambda) -> String {
    match lambda {
        Lambda::Symbolic => "symbolic".to_string(),
        Lambda::Fixed(r) => r.to_string(),
    }
}

fn select_fields<'a>(entry: &'a CatalogueEntry, spec: &str) -> Result<Vec<&'a CatalogueField>> {
    if spec.trim() == "all" {
        return Ok(entry.fields.iter().collect());
    }
    let names: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::ValidationError("--fields selects nothing".into()));
    }
    names
        .into_iter()
        .map(|name| {
            entry.field(name).ok_or_else(|| {
                Error::ValidationError(format!(
                    "no field named `{name}` in `{}`; available: {}",
                    entry.metric.name,
                    entry.field_names().join(", ")
                ))
            })
        })
        .collect()
}

fn cmd_check(args: &CheckArgs) -> Result<(CheckReport, i32)> {
    let entry = args.source.resolve()?;
    let cfg = args.sampling.config()?;
    let lambda = parse_lambda(&args.lambda)?;
    let metric_name = entry.metric.name.clone();
    let lag = build_lagrangian(
        entry.metric.clone(),
        lambda.clone(),
        entry.volume.clone(),
        &cfg,
    )?;
    let selected = select_fields(&entry, &args.fields)?;

    // Fixtures record the symbolic-lambda run; a fixed lambda changes the
    // expected verdicts, so fixtures are only compared when symbolic.
    let compare_fixtures = matches!(lambda, Lambda::Symbolic);
    let mut fields = selected
        .par_iter()
        .map(|cf| -> Result<FieldReport> {
            let analysis = check_noether(&lag, &cf.field, &cfg)?;
            let mismatches = match (&cf.fixture, compare_fixtures) {
                (Some(fx), true) => {
                    Some(catalogue::fixture_mismatches(fx, &analysis, &lag, &cfg)?)
                }
                _ => None,
            };
            Ok(FieldReport::from_analysis(&analysis, mismatches))
        })
        .collect::<Result<Vec<_>>>()?;
    fields.sort_by(|a, b| a.name.cmp(&b.name));

    let report = CheckReport {
        schema_version: SCHEMA_VERSION,
        metric: metric_name,
        lambda: lambda_label(&lambda),
        seed: cfg.seed,
        samples: cfg.n,
        tol: cfg.tol,
        fields,
    };
    let code = if report.fixture_failures() > 0 { 4 } else { 0 };
    Ok((report, code))
}

fn cmd_reduce(args: &ReduceArgs) -> Result<(ReduceReport, i32)> {
    let entry = args.source.resolve()?;
    let cfg = args.sampling.config()?;
    let lambda = parse_lambda(&args.lambda)?;
    let lag = build_lagrangian(
        entry.metric.clone(),
        lambda.clone(),
        entry.volume.clone(),
        &cfg,
    )?;

    let coords: Vec<&str> = args
        .by
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if coords.is_empty() {
        return Err(Error::ValidationError(
            "--by needs at least one coordinate".into(),
        ));
    }
    let symmetries = coords
        .iter()
        .map(|c| translation_field(&lag.metric, c))
        .collect::<Result<Vec<_>>>()?;

    let pde = lag.euler_lagrange();
    let red = reduce(&lag.metric, &pde, &symmetries, &cfg)?;
    let mut report = ReduceReport::new(&entry.metric.name, lambda_label(&lambda), &red);
    let mut code = 0;

    if args.verify_paper {
        if !matches!(lambda, Lambda::Symbolic) {
            return Err(Error::ValidationError(
                "--verify-paper compares the symbolic reduction; drop the numeric --lambda"
                    .into(),
            ));
        }
        let normalized = normalize_for_comparison(&red.ode, &[REDUCED_DEP]);
        let outcome = compare_up_to_factor(&normalized, &dust_reference_ode(), &cfg)?;
        if matches!(outcome, Proportionality::NotProportional { .. }) {
            code = 4;
        }
        report.verification = Some(VerifyReport::from(&outcome));
    }

    if args.integrate {
        let lam = match &lambda {
            Lambda::Fixed(r) => r.to_f64().ok_or_else(|| {
                Error::ValidationError(format!("--lambda {r} is out of f64 range"))
            })?,
            Lambda::Symbolic => {
                return Err(Error::ValidationError(
                    "--integrate needs a numeric --lambda".into(),
                ))
            }
        };
        let sol = integrate(
            &red.ode,
            lam,
            (0.0, args.s0, args.sp0),
            args.span,
            &OdeOptions::default(),
        )?;
        let path = args
            .output
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from("trace.txt"));
        let file = fs::File::create(&path)
            .map_err(|e| Error::ValidationError(format!("{}: {e}", path.display())))?;
        let mut w = io::BufWriter::new(file);
        report::write_trace(&mut w, &sol)
            .and_then(|()| w.flush())
            .map_err(|e| Error::ValidationError(format!("{}: {e}", path.display())))?;
        if code == 0 && matches!(sol.termination, Termination::DomainExit { .. }) {
            code = 6;
        }
        report.trace = Some(TraceReport::from_solution(
            &path.display().to_string(),
            &sol,
        ));
    }

    Ok((report, code))
}

fn cmd_list(args: &ListArgs) -> Result<String> {
    let format: Format = args.output.format.into();
    if let Some(path) = &args.file {
        let entry = catalogue::load_file(path)?;
        return Ok(MetricReport::new(&entry).render(format));
    }
    if let Some(name) = &args.metric {
        let entry = catalogue::load(name, catalogue::dir_from_env().as_deref())?;
        return Ok(MetricReport::new(&entry).render(format));
    }
    let entries = catalogue::list(catalogue::dir_from_env().as_deref())?;
    Ok(ListReport::new(&entries).render(format))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::ValidationError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            let _ = io::stdout().flush();
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Check(args) => {
            let (report, code) = cmd_check(args)?;
            emit(&report.render(args.output.format.into()), args.output.out.as_deref())?;
            Ok(code)
        }
        Command::Reduce(args) => {
            let (report, code) = cmd_reduce(args)?;
            // With --integrate, --out already named the trace file.
            let report_out = if args.integrate {
                None
            } else {
                args.output.out.as_deref()
            };
            emit(&report.render(args.output.format.into()), report_out)?;
            Ok(code)
        }
        Command::List(args) => {
            let text = cmd_list(args)?;
            emit(&text, args.output.out.as_deref())?;
            Ok(0)
        }
    }
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses 2 for usage errors and 0 for --help/--version.
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).expect("test arguments parse")
    }

    #[test]
    fn lambda_values() {
        assert!(matches!(parse_lambda("symbolic"), Ok(Lambda::Symbolic)));
        let half = parse_lambda("0.5").unwrap();
        assert_eq!(lambda_label(&half), "1/2");
        let half_again = parse_lambda("1/2").unwrap();
        assert_eq!(lambda_label(&half_again), "1/2");
        let neg = parse_lambda("-2").unwrap();
        assert_eq!(lambda_label(&neg), "-2");
        assert!(parse_lambda("x+1").is_err());
    }

    #[test]
    fn positional_and_flag_metric_are_synonyms() {
        let a = parse(&["minsurf", "check", "frw"]);
        let b = parse(&["minsurf", "check", "--metric", "frw"]);
        let (Command::Check(a), Command::Check(b)) = (&a.command, &b.command) else {
            panic!("expected check");
        };
        assert_eq!(a.source.name.as_deref(), Some("frw"));
        assert_eq!(b.source.metric.as_deref(), Some("frw"));
        assert!(Cli::try_parse_from(["minsurf", "check", "frw", "--metric", "frw"]).is_err());
    }

    #[test]
    fn check_runs_and_reports_fixture_matches() {
        let cli = parse(&["minsurf", "check", "frw-dust", "--fields", "Tx,Rxy"]);
        let Command::Check(args) = &cli.command else {
            panic!("expected check");
        };
        let (report, code) = cmd_check(args).unwrap();
        assert_eq!(code, 0);
        assert_eq!(report.fields.len(), 2);
        // Sorted assembly: Rxy before Tx.
        assert_eq!(report.fields[0].name, "Rxy");
        assert!(report
            .fields
            .iter()
            .all(|f| f.fixture.as_ref().is_some_and(|fx| fx.matches)));
    }

    #[test]
    fn numeric_lambda_skips_fixtures() {
        let cli = parse(&["minsurf", "check", "frw", "--fields", "Tx", "--lambda", "0"]);
        let Command::Check(args) = &cli.command else {
            panic!("expected check");
        };
        let (report, code) = cmd_check(args).unwrap();
        assert_eq!(code, 0);
        assert_eq!(report.lambda, "0");
        assert!(report.fields[0].fixture.is_none());
    }

    #[test]
    fn unknown_field_is_a_validation_error() {
        let cli = parse(&["minsurf", "check", "frw", "--fields", "Qx"]);
        let Command::Check(args) = &cli.command else {
            panic!("expected check");
        };
        let err = cmd_check(args).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn reduce_rejects_integration_with_symbolic_lambda() {
        let cli = parse(&["minsurf", "reduce", "frw-dust", "--by", "y,z", "--integrate"]);
        let Command::Reduce(args) = &cli.command else {
            panic!("expected reduce");
        };
        let err = cmd_reduce(args).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn reduce_by_dependent_variable_is_a_reduction_error() {
        let cli = parse(&["minsurf", "reduce", "frw-dust", "--by", "y,t"]);
        let Command::Reduce(args) = &cli.command else {
            panic!("expected reduce");
        };
        let err = cmd_reduce(args).unwrap_err();
        assert_eq!(err.exit_code(), 6);
    }

    #[test]
    fn reduce_verifies_the_reference_form() {
        let cli = parse(&["minsurf", "reduce", "frw-dust", "--by", "y,z", "--verify-paper"]);
        let Command::Reduce(args) = &cli.command else {
            panic!("expected reduce");
        };
        let (report, code) = cmd_reduce(args).unwrap();
        assert_eq!(code, 0);
        let v = report.verification.expect("verification requested");
        assert!(v.proportional);
        assert!((v.factor.unwrap() + 1.0 / 3.0).abs() < 1e-8);
    }
}
