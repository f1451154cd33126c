//! Acceptance gate: one test per release criterion, each printing a single
//! `criterion N: PASS/FAIL` line (run with `--nocapture` to see the lines
//! for passing tests; failing tests always show theirs).
//!
//! Criterion 1 is expected to fail on two of its five sub-checks: the
//! external reference table this suite transcribes lists the T2 and T3
//! gauge vectors with the opposite global sign. The constructed vectors
//! satisfy the defining divergence relation and the full symmetry
//! condition (enforced by the catalogue fixture tests); the table-signed
//! vectors satisfy neither. The discrepancy is documented in the README
//! and kept red here on purpose: this suite checks the table as printed.

use std::collections::BTreeSet;
use std::process::Command;

use minsurf::catalogue::{self, CATALOGUE_DIR_ENV};
use minsurf::expr::{
    diff, eval, is_zero, parse, substitute_many, Bindings, Expr, ZeroVerdict,
};
use minsurf::geometry::VectorField;
use minsurf::integrate::{integrate, OdeOptions, Termination};
use minsurf::noether::{
    build_lagrangian, check_noether, check_unconstrained, construct_gauge, jet, jet2,
    GaugeOutcome, Lambda, MinSurfLagrangian, Verdict,
};
use minsurf::numutil::least_squares;
use minsurf::reduction::{
    commutator, compare_up_to_factor, dust_reference_ode, normalize_for_comparison, reduce,
    translation_field, Proportionality, REDUCED_DEP,
};
use minsurf::sample::SampleConfig;

fn verdict_line(n: usize, ok: bool, what: &str) {
    println!("criterion {n}: {} - {what}", if ok { "PASS" } else { "FAIL" });
}

fn lagrangian(name: &str, lambda: Lambda, cfg: &SampleConfig) -> MinSurfLagrangian {
    let entry = catalogue::load(name, None).expect("builtin entry loads");
    build_lagrangian(entry.metric.clone(), lambda, entry.volume.clone(), cfg)
        .expect("builtin entry assembles")
}

fn e(src: &str) -> Expr {
    parse(src).expect("test expression parses")
}

#[test]
fn criterion_1_translation_gauges_match_the_reference_table() {
    let cfg = SampleConfig::default();
    let lag = lagrangian("euclidean3-spherical", Lambda::Symbolic, &cfg);
    let scfg = lag.metric.sampling(&cfg);
    let entry = catalogue::load("euclidean3-spherical", None).unwrap();

    // The reference table, transcribed as printed. Phi is arbitrary, so the
    // comparison takes Phi = 0 and asks is_zero of the difference.
    let table: [(&str, [&str; 2]); 3] = [
        (
            "T1",
            [
                "-1/6*lambda*r^2*sin(theta)*cos(theta)*sin(phi)",
                "-1/6*lambda*r^2*cos(phi)",
            ],
        ),
        (
            "T2",
            [
                "1/6*lambda*r^2*sin(theta)*cos(theta)*cos(phi)",
                "-1/6*lambda*r^2*sin(phi)",
            ],
        ),
        ("T3", ["-1/6*lambda*r^2*sin(theta)^2", "0"]),
    ];

    let mut failures = Vec::new();
    for (name, expected) in &table {
        let field = &entry.field(name).unwrap().field;
        let a = match construct_gauge(&lag, field, &cfg).unwrap() {
            GaugeOutcome::Constructed { a, .. } => a,
            GaugeOutcome::NoSolution { reason, .. } => {
                failures.push(format!("{name}: no gauge constructed ({reason})"));
                continue;
            }
        };
        for (k, coord) in lag.metric.coords.iter().enumerate() {
            let difference = Expr::sub(a[k].clone(), e(expected[k]));
            match is_zero(&difference, &scfg, &lag.metric.singular).unwrap() {
                ZeroVerdict::Zero => {}
                _ => failures.push(format!(
                    "{name} component {coord}: constructed {} but the table lists {}",
                    a[k], expected[k]
                )),
            }
        }
    }

    for name in ["K1", "K2", "K3"] {
        let field = &entry.field(name).unwrap().field;
        match construct_gauge(&lag, field, &cfg).unwrap() {
            GaugeOutcome::Constructed { a, .. } => {
                for (k, component) in a.iter().enumerate() {
                    if !matches!(
                        is_zero(component, &scfg, &lag.metric.singular).unwrap(),
                        ZeroVerdict::Zero
                    ) {
                        failures.push(format!("{name} component {k}: gauge not zero"));
                    }
                }
            }
            GaugeOutcome::NoSolution { reason, .. } => {
                failures.push(format!("{name}: no gauge constructed ({reason})"));
            }
        }
    }

    let ok = failures.is_empty();
    verdict_line(
        1,
        ok,
        "translation gauge vectors reproduce the reference table; rotations gauge-free",
    );
    assert!(
        ok,
        "reference-table mismatches:\n  {}\n\
         analysis: the constructed T2/T3 vectors satisfy the defining relation \
         dA^k/du = lambda*V*dxi^k/du and the full symmetry condition (see the \
         catalogue fixtures, which pin the constructed values and reproduce \
         under `check`); the table-signed vectors fail both, and rotating T1 \
         by a quarter turn in phi maps it onto the constructed T2, not the \
         table's. The table entries for T2/T3 carry a sign error, so this \
         criterion stays honestly red. See README \"Known reference \
         discrepancies\".",
        failures.join("\n  ")
    );
}

#[test]
fn criterion_2_sphere_splits_its_isometries() {
    let cfg = SampleConfig::default();
    let lag = lagrangian("sphere3", Lambda::Symbolic, &cfg);
    let entry = catalogue::load("sphere3", None).unwrap();

    let mut ok = true;
    for f in &entry.fields {
        let constrained = check_noether(&lag, &f.field, &cfg).unwrap().verdict;
        let unconstrained = check_unconstrained(&lag, &f.field, &cfg).unwrap().verdict;
        let expected = match f.field.name.as_str() {
            "X1" | "X2" | "X3" => Verdict::NotNoether,
            _ => Verdict::Noether,
        };
        if constrained != expected || unconstrained != Verdict::Noether {
            ok = false;
        }
    }
    verdict_line(
        2,
        ok,
        "X1-X3 obstructed / X4-X6 admitted under the constraint; all six admitted without it",
    );
    assert!(ok, "sphere split verdict did not match the expected pattern");
}

#[test]
fn criterion_3_static_spherical_class_is_fully_noether_with_zero_gauge() {
    let cfg = SampleConfig::default();
    let lag = lagrangian("static-spherical", Lambda::Symbolic, &cfg);
    let scfg = lag.metric.sampling(&cfg);
    let entry = catalogue::load("static-spherical", None).unwrap();

    let mut ok = entry.fields.len() == 4;
    for f in &entry.fields {
        let analysis = check_noether(&lag, &f.field, &cfg).unwrap();
        if analysis.verdict != Verdict::Noether {
            ok = false;
            continue;
        }
        match &analysis.gauge {
            Some(GaugeOutcome::Constructed { a, .. }) => {
                for component in a {
                    if !matches!(
                        is_zero(component, &scfg, &lag.metric.singular).unwrap(),
                        ZeroVerdict::Zero
                    ) {
                        ok = false;
                    }
                }
            }
            _ => ok = false,
        }
    }
    verdict_line(
        3,
        ok,
        "all four generic static spherically symmetric generators are symmetries with vanishing gauge",
    );
    assert!(ok, "static-spherical class verdicts or gauges are wrong");
}

#[test]
fn criterion_4_dust_reduction_reproduces_the_reference_profile_equation() {
    // The criterion pins 50 jet samples with the ratio constant to 1e-8.
    let cfg = SampleConfig {
        n: 50,
        ..SampleConfig::default()
    };
    let lag = lagrangian("frw-dust", Lambda::Symbolic, &cfg);
    let symmetries = vec![
        translation_field(&lag.metric, "y").unwrap(),
        translation_field(&lag.metric, "z").unwrap(),
    ];
    let red = reduce(&lag.metric, &lag.euler_lagrange(), &symmetries, &cfg).unwrap();
    let normalized = normalize_for_comparison(&red.ode, &[REDUCED_DEP]);
    let outcome = compare_up_to_factor(&normalized, &dust_reference_ode(), &cfg).unwrap();

    let (ok, detail) = match outcome {
        Proportionality::Proportional { factor } => {
            (true, format!("constant ratio {factor:.9} across 50 jet samples"))
        }
        Proportionality::NotProportional { reason } => (false, reason),
    };
    verdict_line(4, ok, &format!("reduced profile equation vs reference form: {detail}"));
    assert!(ok, "dust reduction is not proportional to the reference form: {detail}");
}

#[test]
fn criterion_5_killing_is_necessary() {
    let cfg = SampleConfig::default();
    // The four class metrics carry 6 + 6 + 4 + 6 = 22 (metric, field) pairs.
    let universe = [
        "euclidean3-spherical",
        "sphere3",
        "static-spherical",
        "frw",
    ];

    let mut ok = true;
    let mut pairs = 0;
    let mut perturbed_rejections = 0;

    for name in universe {
        let entry = catalogue::load(name, None).unwrap();
        let lag = lagrangian(name, Lambda::Symbolic, &cfg);
        for f in &entry.fields {
            pairs += 1;
            let report = lag.metric.is_killing(&f.field, &cfg).unwrap();
            if !report.is_killing || report.max_residual > 1e-9 {
                ok = false;
            }
        }
    }
    if pairs != 22 {
        ok = false;
    }

    // 20 deterministic smooth perturbations, amplitude 1/10, cycling over
    // the pairs, the perturbed component, and the coordinate entering the
    // bump. Quadratic bumps never land back in any entry's isometry span.
    let mut flat: Vec<(&str, usize)> = Vec::new();
    for name in universe {
        let entry = catalogue::load(name, None).unwrap();
        for i in 0..entry.fields.len() {
            flat.push((name, i));
        }
    }
    for k in 0..20usize {
        let (name, field_index) = flat[k % flat.len()];
        let entry = catalogue::load(name, None).unwrap();
        let lag = lagrangian(name, Lambda::Symbolic, &cfg);
        let base = &entry.fields[field_index].field;

        let mut vars = vec![lag.metric.u.clone()];
        vars.extend(lag.metric.coords.iter().cloned());
        let bump_var = &vars[k % vars.len()];
        let bump = e(&format!("1/10*{bump_var}^2"));

        let width = 1 + lag.metric.coords.len();
        let slot = k % width;
        let mut perturbed = VectorField {
            name: format!("{}-perturbed-{k}", base.name),
            eta: base.eta.clone(),
            xi: base.xi.clone(),
        };
        if slot == 0 {
            perturbed.eta = Expr::add2(perturbed.eta, bump);
        } else {
            perturbed.xi[slot - 1] = Expr::add2(perturbed.xi[slot - 1].clone(), bump);
        }

        let verdict = check_noether(&lag, &perturbed, &cfg).unwrap().verdict;
        if verdict == Verdict::NotNoether {
            perturbed_rejections += 1;
        } else {
            ok = false;
        }
    }
    if perturbed_rejections != 20 {
        ok = false;
    }

    verdict_line(
        5,
        ok,
        "all 22 catalogue pairs are Killing within 1e-9; all 20 perturbed fields rejected",
    );
    assert!(
        ok,
        "Killing necessity failed: {pairs} pairs checked, {perturbed_rejections}/20 perturbations rejected"
    );
}

#[test]
fn criterion_6_round_sphere_is_on_shell_and_its_currents_conserve() {
    let cfg = SampleConfig::default();
    let lag = lagrangian("euclidean3-spherical", Lambda::Symbolic, &cfg);
    let entry = catalogue::load("euclidean3-spherical", None).unwrap();
    let m = &lag.metric;
    let scfg = m.sampling(&cfg);

    // Constant graph: every jet vanishes; the stationarity multiplier for
    // the sphere of radius r is lambda = -2/r.
    let mut on_shell = std::collections::BTreeMap::new();
    for (i, c) in m.coords.iter().enumerate() {
        on_shell.insert(jet(&m.u, c), Expr::zero());
        for j in i..m.coords.len() {
            on_shell.insert(jet2(&m.u, &m.coords, i, j), Expr::zero());
        }
    }
    on_shell.insert("lambda".into(), e("-2/r"));

    let max_abs = |expr: &Expr| -> f64 {
        let mut syms: BTreeSet<String> = expr.free_symbols();
        for s in &m.singular {
            syms.extend(s.free_symbols());
        }
        let mut rng = scfg.rng();
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let point: Bindings = scfg.sample_avoiding(&syms, &m.singular, &mut rng).unwrap();
            worst = worst.max(eval(expr, &point).unwrap().abs());
        }
        worst
    };

    let stationarity = substitute_many(&lag.euler_lagrange(), &on_shell);
    let el_residual = max_abs(&stationarity);
    let mut ok = el_residual <= 1e-8;

    let zero_gauge = vec![Expr::zero(); m.dim()];
    let mut worst_divergence: f64 = 0.0;
    for name in ["K1", "K2", "K3"] {
        let field = &entry.field(name).unwrap().field;
        let divergence =
            substitute_many(&lag.current_divergence(field, &zero_gauge), &on_shell);
        worst_divergence = worst_divergence.max(max_abs(&divergence));
    }
    ok &= worst_divergence <= 1e-8;

    verdict_line(
        6,
        ok,
        &format!(
            "stationarity residual {el_residual:.3e}, worst on-shell current divergence {worst_divergence:.3e} (both <= 1e-8)"
        ),
    );
    assert!(ok, "on-shell sphere check failed");
}

#[test]
fn criterion_7_property_suites_hold() {
    let mut failures = Vec::new();

    derivatives_match_finite_differences(&mut failures);
    printing_and_parsing_are_a_fixpoint(&mut failures);
    zero_test_makes_no_misclassifications(&mut failures);
    integrator_self_convergence(&mut failures);
    reduction_is_order_independent(&mut failures);

    let ok = failures.is_empty();
    verdict_line(
        7,
        ok,
        "derivative/FD agreement, canonical fixpoint, zero-test suite, integrator self-convergence, reduction order-independence",
    );
    assert!(ok, "property suite failures:\n  {}", failures.join("\n  "));
}

fn derivatives_match_finite_differences(failures: &mut Vec<String>) {
    let cases = [
        "sin(x)*cos(y)",
        "x^3*y - 2*x*y^2 + y^3",
        "(x^2 + y^2 + 1)^(1/2)",
        "exp(x/2)*log(y + 2)",
        "sin(x)^2*cos(y)^3",
        "x^(5/3) + y^(3/2)",
        "1/(x + y + 2)",
    ];
    let cfg = SampleConfig::default();
    let mut rng = cfg.rng();
    let syms: BTreeSet<String> = ["x".to_string(), "y".to_string()].into();
    let h = 1e-5;
    for src in cases {
        let expr = e(src);
        for var in ["x", "y"] {
            let exact = diff(&expr, var);
            for _ in 0..5 {
                let point = cfg.sample_point(&syms, &mut rng);
                let mut hi = point.clone();
                let mut lo = point.clone();
                *hi.get_mut(var).unwrap() += h;
                *lo.get_mut(var).unwrap() -= h;
                let fd = (eval(&expr, &hi).unwrap() - eval(&expr, &lo).unwrap()) / (2.0 * h);
                let want = eval(&exact, &point).unwrap();
                if (fd - want).abs() > 1e-6 * (1.0 + want.abs()) {
                    failures.push(format!(
                        "d/d{var} [{src}]: finite difference {fd}, derivative {want}"
                    ));
                }
            }
        }
    }
}

fn printing_and_parsing_are_a_fixpoint(failures: &mut Vec<String>) {
    let cases = [
        "x + x + y*x - 2*x",
        "(x + y)^2*(x - y)",
        "sin(x)^2/(1 + cos(x))*x^(-1/2)",
        "-3/4*x*y + y*x*3/4 + 1",
        "exp(x)*exp(y)*exp(x)",
        "((x^2)^3)^(1/2) * x^(-1)",
        "1 + 0*x + y^0",
    ];
    for src in cases {
        let once = e(src);
        let twice = parse(&once.to_string()).unwrap_or_else(|err| {
            panic!("printed form of `{src}` failed to reparse: {err}")
        });
        if once != twice {
            failures.push(format!(
                "canonical fixpoint broken for `{src}`: `{once}` reparses as `{twice}`"
            ));
        }
    }
}

fn zero_test_makes_no_misclassifications(failures: &mut Vec<String>) {
    let cfg = SampleConfig::default();
    let no_singular: Vec<Expr> = Vec::new();

    // Identities: every verdict must be Zero. Symbols sample in [0.5, 3],
    // so square roots and logarithms stay on their principal branch.
    let identities = [
        "sin(x)^2 + cos(x)^2 - 1",
        "(x + y)^2 - x^2 - 2*x*y - y^2",
        "(x - y)*(x + y) - x^2 + y^2",
        "exp(x)*exp(-x) - 1",
        "log(exp(x)) - x",
        "sin(2*x) - 2*sin(x)*cos(x)",
        "cos(2*x) - cos(x)^2 + sin(x)^2",
        "(x^2)^(1/2) - x",
        "x^(1/2)*x^(1/2) - x",
        "(x*y)^(1/2) - x^(1/2)*y^(1/2)",
        "sin(x + y) - sin(x)*cos(y) - cos(x)*sin(y)",
        "cos(x + y) - cos(x)*cos(y) + sin(x)*sin(y)",
        "(x + y + z)^2 - x^2 - y^2 - z^2 - 2*x*y - 2*x*z - 2*y*z",
        "exp(x + y) - exp(x)*exp(y)",
        "log(x*y) - log(x) - log(y)",
        "x^3 - x*x^2",
        "abs(x) - x",
        "sin(x)^4 - (sin(x)^2)^2",
        "(1 + x)^3 - 1 - 3*x - 3*x^2 - x^3",
        "(x + 1)*(x + 2) - x^2 - 3*x - 2",
    ];
    // Non-identities: every verdict must be NonZero, witness included.
    let non_identities = [
        "sin(x)^2 + cos(x)^2 - 1 + x/100",
        "(x + y)^2 - x^2 - y^2",
        "sin(2*x) - 2*sin(x)*cos(x) + 1/50",
        "exp(x) - 1 - x",
        "log(x + 1) - x",
        "sin(x) - x",
        "cos(x) - 1",
        "x^2 - y^2",
        "sin(x*y) - sin(x)*sin(y)",
        "(x + y)^(1/2) - x^(1/2) - y^(1/2)",
        "exp(x)*exp(y) - exp(x*y)",
        "log(x) + log(y) - log(x + y)",
        "x^3 - x^2",
        "x - 2*x",
        "sin(x + y) - sin(x) - sin(y)",
        "cos(x)^2 - sin(x)^2",
        "1/x - 1/(x + 1)",
        "x*y - x - y",
        "(x^2 + y^2)^(1/2) - x - y",
        "sin(x)^2 + cos(y)^2 - 1",
    ];

    for src in identities {
        match is_zero(&e(src), &cfg, &no_singular).unwrap() {
            ZeroVerdict::Zero => {}
            other => failures.push(format!("identity `{src}` misclassified as {other:?}")),
        }
    }
    for src in non_identities {
        match is_zero(&e(src), &cfg, &no_singular).unwrap() {
            ZeroVerdict::NonZero(_) => {}
            other => failures.push(format!("non-identity `{src}` misclassified as {other:?}")),
        }
    }
}

fn integrator_self_convergence(failures: &mut Vec<String>) {
    let cfg = SampleConfig::default();
    let lag = lagrangian("frw-dust", Lambda::Symbolic, &cfg);
    let symmetries = vec![
        translation_field(&lag.metric, "y").unwrap(),
        translation_field(&lag.metric, "z").unwrap(),
    ];
    let red = reduce(&lag.metric, &lag.euler_lagrange(), &symmetries, &cfg).unwrap();

    let loose = integrate(&red.ode, 0.0, (1.0, 1.0, 0.0), 0.5, &OdeOptions::default()).unwrap();
    let tight = integrate(
        &red.ode,
        0.0,
        (1.0, 1.0, 0.0),
        0.5,
        &OdeOptions {
            rtol: 5e-9,
            ..OdeOptions::default()
        },
    )
    .unwrap();
    if loose.termination != Termination::Completed || tight.termination != Termination::Completed {
        failures.push("self-convergence runs did not complete".to_string());
        return;
    }
    let shift = (loose.ss.last().unwrap() - tight.ss.last().unwrap()).abs();
    if shift >= 1e-6 {
        failures.push(format!(
            "endpoint moved {shift:.3e} on tolerance halving (bound 1e-6)"
        ));
    }
}

fn reduction_is_order_independent(failures: &mut Vec<String>) {
    let cfg = SampleConfig::default();
    let lag = lagrangian("frw-dust", Lambda::Symbolic, &cfg);
    let pde = lag.euler_lagrange();
    let yz = reduce(
        &lag.metric,
        &pde,
        &[
            translation_field(&lag.metric, "y").unwrap(),
            translation_field(&lag.metric, "z").unwrap(),
        ],
        &cfg,
    )
    .unwrap();
    let zy = reduce(
        &lag.metric,
        &pde,
        &[
            translation_field(&lag.metric, "z").unwrap(),
            translation_field(&lag.metric, "y").unwrap(),
        ],
        &cfg,
    )
    .unwrap();
    if yz.ode != zy.ode {
        failures.push("reduced equation depends on the elimination order".to_string());
    }
}

#[test]
fn criterion_8_structured_reports_are_byte_identical_across_runs() {
    let full_run = || -> Vec<u8> {
        let mut bytes = Vec::new();
        let mut run = |args: &[&str]| {
            let output = Command::new(env!("CARGO_BIN_EXE_minsurf"))
                .args(args)
                .env_remove(CATALOGUE_DIR_ENV)
                .output()
                .expect("binary runs");
            assert!(
                output.status.success(),
                "`minsurf {}` failed: {}",
                args.join(" "),
                String::from_utf8_lossy(&output.stderr)
            );
            bytes.extend_from_slice(&output.stdout);
        };
        run(&["list", "--format", "structured"]);
        for name in [
            "euclidean3-spherical",
            "sphere3",
            "static-spherical",
            "frw",
            "frw-dust",
        ] {
            run(&["check", name, "--format", "structured"]);
        }
        run(&[
            "reduce",
            "frw-dust",
            "--by",
            "y,z",
            "--verify-paper",
            "--format",
            "structured",
        ]);
        bytes
    };

    let first = full_run();
    let second = full_run();
    let ok = first == second && !first.is_empty();
    verdict_line(8, ok, "two consecutive full structured runs are byte-identical");
    assert!(ok, "structured output differed between identical runs");
}

// Not a numbered criterion: the isometry algebra of flat 3-space must close
// under the bracket. Each commutator of verified fields is expressed in the
// six-field span by least squares; the fit must be essentially exact.
#[test]
fn e3_killing_algebra_closes_under_commutators() {
    let cfg = SampleConfig::default();
    let entry = catalogue::load("euclidean3-spherical", None).unwrap();
    let m = &entry.metric;
    let scfg = m.sampling(&cfg);
    let fields: Vec<&VectorField> = entry.fields.iter().map(|f| &f.field).collect();

    let mut syms: BTreeSet<String> = BTreeSet::new();
    for f in &fields {
        syms.extend(f.eta.free_symbols());
        for c in &f.xi {
            syms.extend(c.free_symbols());
        }
    }
    for s in &m.singular {
        syms.extend(s.free_symbols());
    }

    let mut rng = scfg.rng();
    let points: Vec<Bindings> = (0..40)
        .map(|_| scfg.sample_avoiding(&syms, &m.singular, &mut rng).unwrap())
        .collect();

    for a in 0..fields.len() {
        for b in (a + 1)..fields.len() {
            let bracket = commutator(m, fields[a], fields[b]);
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            fn component(f: &VectorField, comp: usize) -> &Expr {
                if comp == 0 {
                    &f.eta
                } else {
                    &f.xi[comp - 1]
                }
            }
            for point in &points {
                for comp in 0..=m.dim() {
                    rows.push(
                        fields
                            .iter()
                            .map(|f| eval(component(f, comp), point).unwrap())
                            .collect::<Vec<_>>(),
                    );
                    rhs.push(eval(component(&bracket, comp), point).unwrap());
                }
            }
            let coefficients =
                least_squares(&rows, &rhs, fields.len()).expect("span fit is well-posed");
            let mut residual: f64 = 0.0;
            for (row, &y) in rows.iter().zip(&rhs) {
                let fit: f64 = row.iter().zip(&coefficients).map(|(r, c)| r * c).sum();
                residual = residual.max((fit - y).abs());
            }
            assert!(
                residual <= 1e-8,
                "[{}, {}] leaves the Killing span (residual {residual:.3e})",
                fields[a].name,
                fields[b].name
            );
        }
    }
}
