//! Numerical integration of reduced profile equations.
//!
//! The reduced equation `A(x,s,s_x) s_xx + B(x,s,s_x) = 0` is solved for
//! `s_xx` and marched with the Dormand-Prince 5(4) embedded pair, adaptive
//! by default. Output lands on a uniform grid by capping steps at grid
//! nodes, so the trace needs no interpolation. The trace's residual column
//! is an independent check: `s_xx` is re-estimated from the `s'` column by
//! fourth-order finite differences and substituted back into the equation,
//! so a wrong march shows up as a large residual rather than a tautology.
//!
//! Fractional powers confine the dependent variable to `s > 0`; leaving
//! that region (or any evaluation failure ahead of the front) ends the
//! march with a partial trace and a recorded reason rather than an error.

use crate::error::{Error, Result};
use crate::expr::{diff, eval, substitute, Bindings, Expr};
use crate::reduction::{REDUCED_DEP, REDUCED_INDEP, REDUCED_JET1, REDUCED_JET2};

/// Default relative tolerance for the adaptive march.
pub const DEFAULT_RTOL: f64 = 1e-8;
/// Default absolute tolerance floor.
pub const DEFAULT_ATOL: f64 = 1e-12;
/// Default number of uniform output intervals.
pub const DEFAULT_GRID: usize = 512;
/// A healthy run on the default grid uses a few thousand step attempts;
/// the budget is a couple of orders above that.
pub const DEFAULT_MAX_STEPS: usize = 100_000;
/// The residual invariant: max scale-relative trace residual must stay
/// below `rtol * RESIDUAL_SAFETY` on completed adaptive runs. Assumes the
/// output grid is fine enough that the fourth-order stencil's own
/// truncation error (`~h^4`) sits under the bound; the default grid does.
pub const RESIDUAL_SAFETY: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Embedded-error step control.
    Adaptive,
    /// Fixed step of the given size (subdivided to land on grid nodes);
    /// no error control. Used for convergence-order measurements.
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub step: StepPolicy,
    /// Number of uniform output intervals (the trace has `grid + 1` rows).
    pub grid: usize,
    /// Ceiling on step attempts for the whole run. A march into a blowup
    /// keeps taking ever-smaller accepted steps without ever stalling in
    /// floating point; the budget turns that crawl into a domain exit.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            step: StepPolicy::Adaptive,
            grid: DEFAULT_GRID,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// The march stopped early; the trace covers `[x0, at]`.
    DomainExit { at: f64, reason: String },
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub xs: Vec<f64>,
    pub ss: Vec<f64>,
    pub sps: Vec<f64>,
    /// Finite-difference residual of the equation along the trace; empty
    /// when the trace is too short for the fourth-order stencils.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Largest residual relative to the equation's term scale at each row;
    /// this is the quantity the residual invariant bounds.
    pub max_relative_residual: f64,
    pub termination: Termination,
    pub method_order: u32,
    pub rtol: f64,
    pub atol: f64,
    pub lambda: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

/// The equation split as `A * s_xx + B`, both free of `s_xx`.
#[derive(Debug, Clone)]
pub struct ProfileOde {
    pub leading: Expr,
    pub rest: Expr,
}

/// Split a reduced equation into its quasilinear form.
pub fn quasilinear_form(ode: &Expr) -> Result<ProfileOde> {
    let leading = diff(ode, REDUCED_JET2);
    if leading.contains_symbol(REDUCED_JET2) {
        return Err(Error::ValidationError(
            "equation is not quasilinear in s_xx".into(),
        ));
    }
    let rest = substitute(ode, REDUCED_JET2, &Expr::zero());
    Ok(ProfileOde { leading, rest })
}

impl ProfileOde {
    fn bindings(&self, x: f64, s: f64, sp: f64, lambda: f64) -> Bindings {
        let mut b = Bindings::new();
        b.insert(REDUCED_INDEP.to_string(), x);
        b.insert(REDUCED_DEP.to_string(), s);
        b.insert(REDUCED_JET1.to_string(), sp);
        b.insert("lambda".to_string(), lambda);
        b
    }

    /// `s_xx` at a state point, or the reason the state left the domain.
    fn solve(&self, x: f64, s: f64, sp: f64, lambda: f64) -> std::result::Result<f64, String> {
        if !s.is_finite() || !sp.is_finite() {
            return Err(format!("state left the finite range at x = {x:.6}"));
        }
        if s <= 0.0 {
            return Err(format!("s reached {s:.3e} (must stay positive)"));
        }
        let b = self.bindings(x, s, sp, lambda);
        let av = eval(&self.leading, &b).map_err(|e| e.to_string())?;
        let bv = eval(&self.rest, &b).map_err(|e| e.to_string())?;
        if av.abs() <= 1e-300 {
            return Err(format!("leading coefficient vanished at x = {x:.6}"));
        }
        let spp = -bv / av;
        // Both sides can overflow near a blowup; inf/inf would hand the
        // stepper a NaN dressed up as success.
        if !spp.is_finite() {
            return Err(format!("equation value left the finite range at x = {x:.6}"));
        }
        Ok(spp)
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State = [f64; 2];

struct Stepper<'a> {
    ode: &'a ProfileOde,
    lambda: f64,
}

impl Stepper<'_> {
    fn f(&self, x: f64, y: State) -> std::result::Result<State, String> {
        Ok([y[1], self.ode.solve(x, y[0], y[1], self.lambda)?])
    }

    /// One DP5(4) step. Returns the 5th-order update and the embedded
    /// error estimate.
    fn step(&self, x: f64, y: State, h: f64) -> std::result::Result<(State, [f64; 2]), String> {
        let mut k = [[0.0f64; 2]; 7];
        k[0] = self.f(x, y)?;
        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = A[i][j];
                if a != 0.0 {
                    yi[0] += h * a * kj[0];
                    yi[1] += h * a * kj[1];
                }
            }
            k[i] = self.f(x + C[i] * h, yi)?;
        }
        let mut y5 = y;
        let mut err = [0.0f64; 2];
        for i in 0..7 {
            y5[0] += h * B5[i] * k[i][0];
            y5[1] += h * B5[i] * k[i][1];
            err[0] += h * (B5[i] - B4[i]) * k[i][0];
            err[1] += h * (B5[i] - B4[i]) * k[i][1];
        }
        Ok((y5, err))
    }
}

/// Integrate a reduced equation from `(x0, s0, sp0)` over `span > 0`.
///
/// The equation may mention `lambda`; the given value is bound at every
/// evaluation. Any other free symbol is an error when first evaluated.
pub fn integrate(
    ode: &Expr,
    lambda: f64,
    initial: (f64, f64, f64),
    span: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution> {
    let (x0, s0, sp0) = initial;
    if !(s0 > 0.0) {
        return Err(Error::ValidationError(format!(
            "initial value s0 must be positive, got {s0}"
        )));
    }
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::ValidationError(format!(
            "span must be positive and finite, got {span}"
        )));
    }
    if opts.grid < 8 {
        return Err(Error::ValidationError(
            "output grid needs at least 8 intervals".into(),
        ));
    }
    if opts.max_steps == 0 {
        return Err(Error::ValidationError("step budget must be positive".into()));
    }
    if let StepPolicy::Fixed(h) = opts.step {
        if !(h > 0.0) {
            return Err(Error::ValidationError(format!(
                "fixed step must be positive, got {h}"
            )));
        }
    }

    let form = quasilinear_form(ode)?;
    // The solvability precondition at the initial point is an error, not a
    // domain exit: the march never started.
    match form.solve(x0, s0, sp0, lambda) {
        Ok(_) => {}
        Err(reason) if reason.contains("leading coefficient") => {
            return Err(Error::LeadingCoefficientVanishes)
        }
        Err(reason) => return Err(Error::DomainError(reason)),
    }

    let stepper = Stepper { ode: &form, lambda };
    let dx = span / opts.grid as f64;

    let mut xs = vec![x0];
    let mut ss = vec![s0];
    let mut sps = vec![sp0];
    let mut y: State = [s0, sp0];
    let mut x = x0;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut exit: Option<String> = None;

    let mut h_guess = match opts.step {
        StepPolicy::Adaptive => dx / 8.0,
        StepPolicy::Fixed(h) => h,
    };

    'nodes: for node in 1..=opts.grid {
        let target = x0 + span * node as f64 / opts.grid as f64;
        match opts.step {
            StepPolicy::Fixed(h) => {
                let n_sub = (((target - x) / h).ceil() as usize).max(1);
                let h_eff = (target - x) / n_sub as f64;
                for _ in 0..n_sub {
                    if accepted + rejected >= opts.max_steps {
                        exit = Some(format!(
                            "step budget of {} exhausted at x = {x:.6}",
                            opts.max_steps
                        ));
                        break 'nodes;
                    }
                    match stepper.step(x, y, h_eff) {
                        Ok((y_new, _)) => {
                            y = y_new;
                            x += h_eff;
                            accepted += 1;
                        }
                        Err(reason) => {
                            exit = Some(reason);
                            break 'nodes;
                        }
                    }
                }
                x = target;
            }
            StepPolicy::Adaptive => {
                while x < target - 1e-12 * span {
                    if accepted + rejected >= opts.max_steps {
                        exit = Some(format!(
                            "step budget of {} exhausted at x = {x:.6}",
                            opts.max_steps
                        ));
                        break 'nodes;
                    }
                    let h = h_guess.min(target - x);
                    let attempt = stepper.step(x, y, h);
                    match attempt {
                        Ok((y_new, err)) => {
                            let tol0 = opts.atol + opts.rtol * y[0].abs().max(y_new[0].abs());
                            let tol1 = opts.atol + opts.rtol * y[1].abs().max(y_new[1].abs());
                            let en =
                                (((err[0] / tol0).powi(2) + (err[1] / tol1).powi(2)) / 2.0).sqrt();
                            if en <= 1.0 {
                                // An accepted step that cannot move x is a
                                // stall, not progress; near a blowup the
                                // march otherwise loops here forever.
                                if x + h == x {
                                    exit = Some(format!(
                                        "step size collapsed below the floating-point spacing at x = {x:.6}"
                                    ));
                                    break 'nodes;
                                }
                                x += h;
                                y = y_new;
                                accepted += 1;
                                let grow = if en == 0.0 {
                                    5.0
                                } else {
                                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                                };
                                h_guess = h * grow;
                            } else {
                                rejected += 1;
                                // A NaN estimate (trial state overflowed)
                                // must still shrink the step, not poison it.
                                let shrink = if en.is_finite() {
                                    (0.9 * en.powf(-0.2)).clamp(0.2, 1.0)
                                } else {
                                    0.2
                                };
                                h_guess = h * shrink;
                                // Finishing the interval at a step this far
                                // below its width would need upward of 1e7
                                // more attempts; no resolvable solution
                                // shrinks that deep.
                                if h_guess < 1e-14 * span
                                    || h_guess < 1e-7 * (target - x)
                                    || x + h_guess == x
                                {
                                    exit = Some(format!(
                                        "step size underflow at x = {x:.6}"
                                    ));
                                    break 'nodes;
                                }
                            }
                        }
                        Err(reason) => {
                            // A stage probed outside the domain; try a
                            // shorter step before giving up.
                            rejected += 1;
                            h_guess = h / 2.0;
                            if h_guess < 1e-14 * span
                                || h_guess < 1e-7 * (target - x)
                                || x + h_guess == x
                            {
                                exit = Some(reason);
                                break 'nodes;
                            }
                        }
                    }
                }
                x = target;
            }
        }
        xs.push(x);
        ss.push(y[0]);
        sps.push(y[1]);
    }

    let termination = match exit {
        None => Termination::Completed,
        Some(reason) => Termination::DomainExit { at: x, reason },
    };

    let (residuals, max_relative_residual) = trace_residuals(&form, ode, lambda, &xs, &ss, &sps)?;
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    // The residual invariant is scale-relative (the equation's own term
    // magnitudes grow without bound near steep solutions), matching how the
    // symbolic zero test normalizes. The reported column stays absolute.
    if termination == Termination::Completed
        && opts.step == StepPolicy::Adaptive
        && max_relative_residual > opts.rtol * RESIDUAL_SAFETY
        && !residuals.is_empty()
    {
        return Err(Error::DomainError(format!(
            "relative trace residual {max_relative_residual:.3e} exceeds the bound {:.3e}",
            opts.rtol * RESIDUAL_SAFETY
        )));
    }

    Ok(OdeSolution {
        xs,
        ss,
        sps,
        residuals,
        max_residual,
        max_relative_residual,
        termination,
        method_order: 5,
        rtol: opts.rtol,
        atol: opts.atol,
        lambda,
        steps_accepted: accepted,
        steps_rejected: rejected,
    })
}

/// Equation residual along a trace, with `s_xx` estimated from the `s'`
/// column by fourth-order finite differences (central inside, one-sided at
/// the edges). Returns an empty column when fewer than five rows exist.
pub fn fd_residuals(
    ode: &Expr,
    lambda: f64,
    xs: &[f64],
    ss: &[f64],
    sps: &[f64],
) -> Result<Vec<f64>> {
    let form = quasilinear_form(ode)?;
    Ok(trace_residuals(&form, ode, lambda, xs, ss, sps)?.0)
}

/// Absolute residual column plus the largest scale-relative residual, where
/// the scale is `1 + |A s_xx| + |B|` at each row.
fn trace_residuals(
    form: &ProfileOde,
    ode: &Expr,
    lambda: f64,
    xs: &[f64],
    ss: &[f64],
    sps: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let n = xs.len();
    if n < 5 {
        return Ok((Vec::new(), 0.0));
    }
    let h = xs[1] - xs[0];
    let d1 = |v: &[f64], i: usize| -> f64 {
        if i == 0 {
            (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
        } else if i == 1 {
            (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
        } else if i == n - 2 {
            (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5])
                / (12.0 * h)
        } else if i == n - 1 {
            (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4]
                + 3.0 * v[n - 5])
                / (12.0 * h)
        } else {
            (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
        }
    };

    let mut out = Vec::with_capacity(n);
    let mut max_rel = 0.0f64;
    for i in 0..n {
        let spp = d1(sps, i);
        let mut b = Bindings::new();
        b.insert(REDUCED_INDEP.to_string(), xs[i]);
        b.insert(REDUCED_DEP.to_string(), ss[i]);
        b.insert(REDUCED_JET1.to_string(), sps[i]);
        b.insert(REDUCED_JET2.to_string(), spp);
        b.insert("lambda".to_string(), lambda);
        let r = eval(ode, &b)?;
        let scale =
            1.0 + (eval(&form.leading, &b)? * spp).abs() + eval(&form.rest, &b)?.abs();
        max_rel = max_rel.max(r.abs() / scale);
        out.push(r);
    }
    Ok((out, max_rel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(src: &str) -> Expr {
        parse(src).unwrap()
    }

    fn dust_ode() -> Expr {
        crate::reduction::dust_reference_ode()
    }

    #[test]
    fn quasilinear_split() {
        let form = quasilinear_form(&e("3*s^2*s_xx - s_x + s")).unwrap();
        assert_eq!(form.leading, e("3*s^2"));
        assert_eq!(form.rest, e("-s_x + s"));

        let err = quasilinear_form(&e("s_xx^2 - s")).unwrap_err();
        assert!(matches!(err, Error::ValidationError(_)));
    }

    #[test]
    fn harmonic_oscillator_matches_cosine() {
        // s_xx + s = 0 from (0, 1, 0) is cos(x); stay on s > 0.
        let sol = integrate(&e("s_xx + s"), 0.0, (0.0, 1.0, 0.0), 1.0, &OdeOptions::default())
            .unwrap();
        assert_eq!(sol.termination, Termination::Completed);
        let end = *sol.ss.last().unwrap();
        assert!((end - 1.0f64.cos()).abs() <= 1e-8, "end {end}");
        assert!(sol.max_residual <= 1e-6, "residual {}", sol.max_residual);
    }

    #[test]
    fn fixed_step_shows_fifth_order_convergence() {
        // Coarse output grid so the output nodes do not cap the step.
        let ode = e("s_xx + s");
        let exact = 1.0f64.cos();
        let run = |h: f64| {
            let opts = OdeOptions { step: StepPolicy::Fixed(h), grid: 8, ..Default::default() };
            let sol = integrate(&ode, 0.0, (0.0, 1.0, 0.0), 1.0, &opts).unwrap();
            (*sol.ss.last().unwrap() - exact).abs()
        };
        let e1 = run(1.0 / 16.0);
        let e2 = run(1.0 / 32.0);
        let order = (e1 / e2).log2();
        assert!(
            (order - 5.0).abs() <= 0.5,
            "observed order {order} (errors {e1:.3e}, {e2:.3e})"
        );
    }

    #[test]
    fn half_tolerance_self_convergence() {
        let ode = dust_ode();
        let tight = OdeOptions { rtol: 5e-9, ..Default::default() };
        let a = integrate(&ode, 0.0, (1.0, 1.0, 0.0), 0.5, &OdeOptions::default()).unwrap();
        let b = integrate(&ode, 0.0, (1.0, 1.0, 0.0), 0.5, &tight).unwrap();
        let (ea, eb) = (*a.ss.last().unwrap(), *b.ss.last().unwrap());
        assert!(
            ((ea - eb) / eb).abs() < 1e-6,
            "endpoints {ea} vs {eb}"
        );
    }

    #[test]
    fn dust_trace_meets_the_residual_bound() {
        // Reference-form dust equation, unconstrained, from (1, 1, 0). The
        // solution blows up near x = 1.893, so the span stops well short.
        let sol = integrate(&dust_ode(), 0.0, (1.0, 1.0, 0.0), 0.5, &OdeOptions::default())
            .unwrap();
        assert_eq!(sol.termination, Termination::Completed);
        assert_eq!(sol.xs.len(), DEFAULT_GRID + 1);
        assert!(sol.max_residual <= 1e-6, "residual {}", sol.max_residual);
        // Endpoint pinned against an independent integrator.
        let (s_end, sp_end) = (*sol.ss.last().unwrap(), *sol.sps.last().unwrap());
        assert!((s_end - 1.330833670766).abs() <= 1e-7, "s(1.5) = {s_end}");
        assert!((sp_end - 1.768630907572).abs() <= 1e-6, "s'(1.5) = {sp_end}");
    }

    #[test]
    fn constrained_dust_trace_matches_the_external_pin() {
        let sol = integrate(&dust_ode(), 0.5, (1.0, 1.0, 0.0), 0.4, &OdeOptions::default())
            .unwrap();
        assert_eq!(sol.termination, Termination::Completed);
        let (s_end, sp_end) = (*sol.ss.last().unwrap(), *sol.sps.last().unwrap());
        assert!((s_end - 1.277357191286).abs() <= 1e-7, "s(1.4) = {s_end}");
        assert!((sp_end - 2.027525805158).abs() <= 1e-6, "s'(1.4) = {sp_end}");
    }

    #[test]
    fn blowup_is_reported_as_a_domain_exit_where_scipy_stops() {
        // The unconstrained equation from (1,1,0) leaves the domain near
        // x = 1.8931 (independent integrators agree); a long span must end
        // in a partial trace, not an error or a NaN-filled full trace.
        let sol = integrate(&dust_ode(), 0.0, (1.0, 1.0, 0.0), 1.0, &OdeOptions::default())
            .unwrap();
        match &sol.termination {
            Termination::DomainExit { at, .. } => {
                assert!((at - 1.8931).abs() < 2e-3, "exit at {at}");
            }
            other => panic!("expected domain exit, got {other:?}"),
        }
        for s in &sol.ss {
            assert!(s.is_finite());
        }
    }

    #[test]
    fn blowup_far_from_the_span_end_still_exits() {
        // Same trajectory started at x = 0 with a long span. Here the state
        // overflows f64 before any stage probes s <= 0, which must end in a
        // domain exit, not a stalled march on NaN step sizes.
        let sol = integrate(&dust_ode(), 0.0, (0.0, 1.0, 0.0), 2.0, &OdeOptions::default())
            .unwrap();
        match &sol.termination {
            Termination::DomainExit { at, .. } => {
                assert!((at - 0.8931).abs() < 2e-3, "exit at {at}");
            }
            other => panic!("expected domain exit, got {other:?}"),
        }
        for s in &sol.ss {
            assert!(s.is_finite());
        }
    }

    #[test]
    fn step_budget_exhaustion_is_a_domain_exit() {
        let opts = OdeOptions { max_steps: 3, ..Default::default() };
        let sol = integrate(&e("s_xx"), 0.0, (0.0, 1.0, 0.0), 1.0, &opts).unwrap();
        match &sol.termination {
            Termination::DomainExit { reason, .. } => {
                assert!(reason.contains("step budget"), "{reason}");
            }
            other => panic!("expected domain exit, got {other:?}"),
        }
    }

    #[test]
    fn constant_slab_solution_stays_constant() {
        // Flat-slab profile equation with no multiplier: s_xx*(1+s_x^2)^(-3/2).
        let ode = e("-s_xx*(1 + s_x^2)^(-3/2)");
        let sol = integrate(&ode, 0.0, (0.0, 2.0, 0.0), 3.0, &OdeOptions::default()).unwrap();
        assert_eq!(sol.termination, Termination::Completed);
        for s in &sol.ss {
            assert!((s - 2.0).abs() <= 1e-12, "drifted to {s}");
        }
    }

    #[test]
    fn vanishing_leading_coefficient_is_an_error() {
        // s_x * s_xx + 1 has leading coefficient s_x = 0 at the start.
        let err = integrate(&e("s_x*s_xx + 1"), 0.0, (0.0, 1.0, 0.0), 1.0, &OdeOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::LeadingCoefficientVanishes), "{err:?}");
        assert_eq!(err.exit_code(), 6);
    }

    #[test]
    fn leaving_the_domain_returns_a_partial_trace() {
        // s_xx = -2: parabola s = 1 + x - x^2 crosses zero before x = 2.
        let sol = integrate(&e("s_xx + 2"), 0.0, (0.0, 1.0, 1.0), 2.0, &OdeOptions::default())
            .unwrap();
        match &sol.termination {
            Termination::DomainExit { at, reason } => {
                assert!(*at < 2.0, "exit at {at}");
                assert!(reason.contains("positive"), "{reason}");
            }
            other => panic!("expected domain exit, got {other:?}"),
        }
        assert!(sol.xs.len() < DEFAULT_GRID + 1);
        assert_eq!(sol.xs.len(), sol.ss.len());
    }

    #[test]
    fn unknown_symbols_surface_as_engine_errors() {
        let err = integrate(&e("s_xx + q"), 0.0, (0.0, 1.0, 0.0), 1.0, &OdeOptions::default())
            .unwrap_err();
        assert_eq!(err.exit_code(), 5, "{err:?}");
    }

    #[test]
    fn lambda_value_is_bound() {
        // s_xx = lambda: with lambda = 0.5 from (0,1,0), s = 1 + x^2/4.
        let sol = integrate(&e("s_xx - lambda"), 0.5, (0.0, 1.0, 0.0), 2.0, &OdeOptions::default())
            .unwrap();
        let end = *sol.ss.last().unwrap();
        assert!((end - 2.0).abs() <= 1e-8, "end {end}");
    }
}
