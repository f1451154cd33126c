//! Variational symmetry analysis for the constant-volume minimal-surface
//! functional.
//!
//! The graph of a surface is `u = u(x)` over the slice coordinates, and the
//! first-order Lagrangian density is
//!
//! ```text
//! L = sqrt(|h| + |h| h^ij u_i u_j) + lambda V(u, x),    dV/du = sqrt|h|
//! ```
//!
//! where `u_i` are the gradient (jet) variables and the `lambda` term
//! enforces the volume constraint. A point field `X = eta d/du + xi^i d/dx^i`
//! is a variational symmetry when its first prolongation satisfies
//! `X[1] L + L D_i xi^i = D_i A^i` for some gauge vector `A^k(u, x)`; the
//! analysis here splits that condition by jet order, decides it numerically,
//! and constructs `A` in closed form when the pattern table permits.

mod gauge;

pub use gauge::{construct_gauge, GaugeOutcome};

use crate::error::{Error, Result};
use crate::expr::{
    antiderivative, is_zero, residual_norm, Expr, Rat, Witness, ZeroVerdict,
};
use crate::geometry::{KillingReport, SplitMetric, VectorField};
use crate::sample::SampleConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Lambda {
    /// Keep the multiplier as the free symbol `lambda`.
    Symbolic,
    /// Substitute a fixed rational value; `Fixed(0)` drops the constraint.
    Fixed(Rat),
}

impl Lambda {
    pub fn expr(&self) -> Expr {
        match self {
            Lambda::Symbolic => Expr::sym("lambda"),
            Lambda::Fixed(r) => Expr::num_rat(r.clone()),
        }
    }
}

/// First-order jet symbol `u_i`, named by suffixing the slice coordinate:
/// `r` over `theta` gives `r_theta`.
pub fn jet(u: &str, coord: &str) -> String {
    format!("{u}_{coord}")
}

/// Second-order jet symbol `u_ij`, index-ordered so `jet2(u, i, j)` and
/// `jet2(u, j, i)` coincide.
pub fn jet2(u: &str, coords: &[String], i: usize, j: usize) -> String {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    format!("{u}_{}{}", coords[a], coords[b])
}

#[derive(Debug, Clone)]
pub struct MinSurfLagrangian {
    pub metric: SplitMetric,
    pub lambda: Lambda,
    /// Volume potential `V(u, x)` with `dV/du = sqrt|h|`.
    pub volume: Expr,
    /// The density `L(u, x, u_i)`.
    pub l: Expr,
    /// First-order jet symbol names, aligned with `metric.coords`.
    pub jets: Vec<String>,
}

/// Assemble and validate the Lagrangian. A supplied `volume` is checked
/// against `dV/du = sqrt|h|` on the sampling box; when absent, one is
/// derived by antidifferentiating `sqrt|h|`, which succeeds only for
/// pattern-table integrands.
pub fn build_lagrangian(
    metric: SplitMetric,
    lambda: Lambda,
    volume: Option<Expr>,
    cfg: &SampleConfig,
) -> Result<MinSurfLagrangian> {
    metric.check_nondegenerate(cfg)?;
    let scfg = metric.sampling(cfg);
    let root = metric.sqrt_det_abs();
    let volume = match volume {
        Some(v) => {
            let resid = Expr::sub(metric.diff(&v, &metric.u), root.clone());
            match is_zero(&resid, &scfg, &metric.singular)? {
                ZeroVerdict::Zero => v,
                other => {
                    return Err(Error::NoVolumePotential(format!(
                        "d/d{} of the supplied volume does not match sqrt|h| ({other:?})",
                        metric.u
                    )))
                }
            }
        }
        None => {
            let integrand = sqrt_monomial(&metric.det_abs());
            antiderivative(&integrand, &metric.u).map_err(|e| {
                Error::NoVolumePotential(format!(
                    "no volume potential supplied and sqrt|h| is not table-integrable: {e}"
                ))
            })?
        }
    };
    let jets: Vec<String> = metric.coords.iter().map(|c| jet(&metric.u, c)).collect();
    let inv = metric.inverse();
    let mut quad = vec![Expr::one()];
    for i in 0..metric.dim() {
        for j in 0..metric.dim() {
            quad.push(Expr::mul(vec![
                inv[i][j].clone(),
                Expr::sym(&jets[i]),
                Expr::sym(&jets[j]),
            ]));
        }
    }
    let radicand = Expr::mul2(metric.det_abs(), Expr::add(quad));
    let l = Expr::add2(
        Expr::sqrt(radicand),
        Expr::mul(vec![lambda.expr(), volume.clone()]),
    );
    Ok(MinSurfLagrangian { metric, lambda, volume, l, jets })
}

impl MinSurfLagrangian {
    pub fn lambda_expr(&self) -> Expr {
        self.lambda.expr()
    }

    /// Same geometry under a different multiplier; `Fixed(0)` yields the
    /// unconstrained (plain minimal-surface) Lagrangian.
    pub fn with_lambda(&self, lambda: Lambda) -> Self {
        let mut quad = vec![Expr::one()];
        let inv = self.metric.inverse();
        for i in 0..self.metric.dim() {
            for j in 0..self.metric.dim() {
                quad.push(Expr::mul(vec![
                    inv[i][j].clone(),
                    Expr::sym(&self.jets[i]),
                    Expr::sym(&self.jets[j]),
                ]));
            }
        }
        let l = Expr::add2(
            Expr::sqrt(Expr::mul2(self.metric.det_abs(), Expr::add(quad))),
            Expr::mul(vec![lambda.expr(), self.volume.clone()]),
        );
        MinSurfLagrangian {
            metric: self.metric.clone(),
            lambda,
            volume: self.volume.clone(),
            l,
            jets: self.jets.clone(),
        }
    }

    /// Total derivative along slice direction `i`:
    /// `D_i = d/dx^i + u_i d/du + u_ij d/du_j`.
    pub fn total_derivative(&self, e: &Expr, i: usize) -> Expr {
        let m = &self.metric;
        let mut terms = vec![m.diff(e, &m.coords[i])];
        terms.push(Expr::mul2(
            Expr::sym(&self.jets[i]),
            m.diff(e, &m.u),
        ));
        for j in 0..m.dim() {
            let d = m.diff(e, &self.jets[j]);
            if d.is_lit_zero() {
                continue;
            }
            terms.push(Expr::mul2(
                Expr::sym(&jet2(&m.u, &m.coords, i, j)),
                d,
            ));
        }
        Expr::add(terms)
    }

    /// First prolongation coefficients `eta_i` of the field:
    /// `eta_i = D_i eta - u_j D_i xi^j`.
    pub fn first_prolongation(&self, field: &VectorField) -> Vec<Expr> {
        let m = &self.metric;
        let n = m.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let ui = Expr::sym(&self.jets[i]);
            let mut terms = vec![
                m.diff(&field.eta, &m.coords[i]),
                Expr::mul2(ui.clone(), m.diff(&field.eta, &m.u)),
            ];
            for j in 0..n {
                let uj = Expr::sym(&self.jets[j]);
                terms.push(Expr::neg(Expr::mul2(
                    uj.clone(),
                    m.diff(&field.xi[j], &m.coords[i]),
                )));
                terms.push(Expr::neg(Expr::mul(vec![
                    ui.clone(),
                    uj,
                    m.diff(&field.xi[j], &m.u),
                ])));
            }
            out.push(Expr::add(terms));
        }
        out
    }

    /// Raw symmetry-condition residual `X[1] L + L D_i xi^i - D_i A^i`.
    /// Identically zero (as a function of `u`, `x`, and the jets) exactly
    /// when the field is variational with gauge `A`.
    pub fn noether_condition_residual(&self, field: &VectorField, a: &[Expr]) -> Expr {
        let m = &self.metric;
        let n = m.dim();
        let prol = self.first_prolongation(field);
        let mut terms = vec![Expr::mul2(field.eta.clone(), m.diff(&self.l, &m.u))];
        for i in 0..n {
            terms.push(Expr::mul2(field.xi[i].clone(), m.diff(&self.l, &m.coords[i])));
            terms.push(Expr::mul2(prol[i].clone(), m.diff(&self.l, &self.jets[i])));
            terms.push(Expr::mul2(self.l.clone(), self.total_derivative(&field.xi[i], i)));
            terms.push(Expr::neg(self.total_derivative(&a[i], i)));
        }
        Expr::add(terms)
    }

    /// Euler-Lagrange expression `dL/du - D_i dL/du_i`; the field equation
    /// is its vanishing.
    pub fn euler_lagrange(&self) -> Expr {
        let m = &self.metric;
        let mut terms = vec![m.diff(&self.l, &m.u)];
        for i in 0..m.dim() {
            let p = m.diff(&self.l, &self.jets[i]);
            terms.push(Expr::neg(self.total_derivative(&p, i)));
        }
        Expr::add(terms)
    }

    /// Conserved current `I^i = (xi^k u_k - eta) dL/du_i - xi^i L + A^i`.
    pub fn noether_current(&self, field: &VectorField, a: &[Expr]) -> Vec<Expr> {
        let m = &self.metric;
        let n = m.dim();
        let mut chi = vec![Expr::neg(field.eta.clone())];
        for k in 0..n {
            chi.push(Expr::mul2(field.xi[k].clone(), Expr::sym(&self.jets[k])));
        }
        let chi = Expr::add(chi);
        (0..n)
            .map(|i| {
                Expr::add(vec![
                    Expr::mul2(chi.clone(), m.diff(&self.l, &self.jets[i])),
                    Expr::neg(Expr::mul2(field.xi[i].clone(), self.l.clone())),
                    a[i].clone(),
                ])
            })
            .collect()
    }

    /// Total divergence `D_i I^i` of the current; vanishes on solutions of
    /// the field equation when the symmetry condition holds.
    pub fn current_divergence(&self, field: &VectorField, a: &[Expr]) -> Expr {
        let current = self.noether_current(field, a);
        Expr::add(
            current
                .iter()
                .enumerate()
                .map(|(i, c)| self.total_derivative(c, i))
                .collect(),
        )
    }
}

/// `(prod f^e)^(1/2) -> prod f^(e/2)`, sound for factors positive on the
/// sampling box; used only to derive a volume potential when none is given.
fn sqrt_monomial(e: &Expr) -> Expr {
    Expr::mul(
        e.factors()
            .into_iter()
            .map(|f| match f.node() {
                crate::expr::Node::Pow(b, ex) => Expr::pow(b.clone(), ex.clone() / Rat::from_integer(2.into())),
                _ => Expr::sqrt(f.clone()),
            })
            .collect(),
    )
}

/// One named jet-order slice of the symmetry condition, decided by sampling.
#[derive(Debug, Clone)]
pub struct ConditionEntry {
    pub label: &'static str,
    pub verdict: ZeroVerdict,
    pub max_residual: f64,
}

/// The symmetry condition split by jet order. The `metric_*` entries are the
/// isometry content (they do not involve `A`); the `constraint_*` entries
/// tie the volume term to the gauge vector. `eta_u` records that the `d/du`
/// component must be slice-only.
#[derive(Debug, Clone)]
pub struct SplitConditions {
    pub entries: Vec<ConditionEntry>,
}

impl SplitConditions {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.is_zero())
    }

    pub fn get(&self, label: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

pub fn split_conditions(
    lag: &MinSurfLagrangian,
    field: &VectorField,
    a: &[Expr],
    cfg: &SampleConfig,
) -> Result<SplitConditions> {
    let m = &lag.metric;
    let scfg = m.sampling(cfg);
    let n = m.dim();
    let lam = lag.lambda_expr();
    let inv = m.inverse();
    let det = m.det_abs();
    let root = m.sqrt_det_abs();

    let eta_u = vec![m.diff(&field.eta, &m.u)];

    let metric0 = vec![Expr::add2(
        Expr::mul2(field.eta.clone(), m.diff(&det, &m.u)),
        Expr::mul(vec![Expr::num_i(2), det.clone(), m.divergence(&field.xi)]),
    )];

    let mut metric1 = Vec::with_capacity(n);
    for k in 0..n {
        let mut terms = vec![m.diff(&field.xi[k], &m.u)];
        for i in 0..n {
            terms.push(Expr::mul2(
                inv[i][k].clone(),
                m.diff(&field.eta, &m.coords[i]),
            ));
        }
        metric1.push(Expr::add(terms));
    }

    let sym_grad = m.sym_grad_raised(&field.xi);
    let mut metric2 = Vec::new();
    for i in 0..n {
        for j in i..n {
            metric2.push(Expr::add(vec![
                Expr::mul2(Expr::num_i(-2), sym_grad[i][j].clone()),
                Expr::mul2(field.eta.clone(), m.diff(&inv[i][j], &m.u)),
                Expr::mul(vec![
                    Expr::num_i(2),
                    inv[i][j].clone(),
                    m.diff(&field.eta, &m.u),
                ]),
            ]));
        }
    }

    let mut cons0_terms = vec![Expr::mul(vec![lam.clone(), root, field.eta.clone()])];
    for k in 0..n {
        cons0_terms.push(Expr::mul2(
            lam.clone(),
            m.diff(
                &Expr::mul2(lag.volume.clone(), field.xi[k].clone()),
                &m.coords[k],
            ),
        ));
        cons0_terms.push(Expr::neg(m.diff(&a[k], &m.coords[k])));
    }
    let cons0 = vec![Expr::add(cons0_terms)];

    let mut cons1 = Vec::with_capacity(n);
    for k in 0..n {
        cons1.push(Expr::sub(
            Expr::mul(vec![
                lam.clone(),
                lag.volume.clone(),
                m.diff(&field.xi[k], &m.u),
            ]),
            m.diff(&a[k], &m.u),
        ));
    }

    let groups: [(&'static str, Vec<Expr>); 6] = [
        ("eta_u", eta_u),
        ("metric_order0", metric0),
        ("metric_order1", metric1),
        ("metric_order2", metric2),
        ("constraint_order0", cons0),
        ("constraint_order1", cons1),
    ];
    let mut entries = Vec::with_capacity(groups.len());
    for (label, exprs) in groups {
        let (verdict, max_residual) = aggregate(&exprs, &scfg, &m.singular)?;
        entries.push(ConditionEntry { label, verdict, max_residual });
    }
    Ok(SplitConditions { entries })
}

fn aggregate(
    exprs: &[Expr],
    cfg: &SampleConfig,
    singular: &[Expr],
) -> Result<(ZeroVerdict, f64)> {
    let mut worst = 0.0f64;
    let mut witness: Option<Witness> = None;
    let mut inconclusive = false;
    for e in exprs {
        match is_zero(e, cfg, singular)? {
            ZeroVerdict::Zero => {}
            ZeroVerdict::NonZero(w) => {
                if witness.is_none() {
                    witness = Some(w);
                }
            }
            ZeroVerdict::Inconclusive => inconclusive = true,
        }
        worst = worst.max(residual_norm(e, cfg, singular)?);
    }
    let verdict = match witness {
        Some(w) => ZeroVerdict::NonZero(w),
        None if inconclusive => ZeroVerdict::Inconclusive,
        None => ZeroVerdict::Zero,
    };
    Ok((verdict, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Noether,
    NotNoether,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Noether => "noether",
            Verdict::NotNoether => "not-noether",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct NoetherAnalysis {
    pub field: String,
    pub killing: KillingReport,
    /// `None` when the field already fails the isometry conditions, so
    /// gauge construction was not attempted.
    pub gauge: Option<GaugeOutcome>,
    pub conditions: SplitConditions,
    /// Verdict on the raw (unsplit) symmetry condition with the constructed
    /// gauge; only present when one was constructed.
    pub residual: Option<ZeroVerdict>,
    pub verdict: Verdict,
}

/// Full decision procedure for one candidate field.
pub fn check_noether(
    lag: &MinSurfLagrangian,
    field: &VectorField,
    cfg: &SampleConfig,
) -> Result<NoetherAnalysis> {
    let m = &lag.metric;
    let scfg = m.sampling(cfg);
    let killing = m.is_killing(field, cfg)?;
    let robustly_not_killing = killing
        .components
        .values()
        .any(|v| matches!(v, ZeroVerdict::NonZero(_)));

    let gauge = if killing.is_killing {
        Some(construct_gauge(lag, field, cfg)?)
    } else {
        None
    };

    let zeros = vec![Expr::zero(); m.dim()];
    let a: &[Expr] = match &gauge {
        Some(GaugeOutcome::Constructed { a, .. }) => a,
        _ => &zeros,
    };
    let conditions = split_conditions(lag, field, a, cfg)?;

    let residual = if matches!(gauge, Some(GaugeOutcome::Constructed { .. })) {
        let resid = lag.noether_condition_residual(field, a);
        Some(is_zero(&resid, &scfg, &m.singular)?)
    } else {
        None
    };

    let verdict = if robustly_not_killing {
        Verdict::NotNoether
    } else if !killing.is_killing {
        Verdict::Inconclusive
    } else {
        match (&gauge, &residual) {
            (Some(GaugeOutcome::NoSolution { .. }), _) => Verdict::NotNoether,
            (Some(GaugeOutcome::Constructed { .. }), Some(ZeroVerdict::Zero)) => Verdict::Noether,
            _ => Verdict::Inconclusive,
        }
    };

    Ok(NoetherAnalysis {
        field: field.name.clone(),
        killing,
        gauge,
        conditions,
        residual,
        verdict,
    })
}

/// The same analysis without the volume constraint (`lambda = 0`): the
/// symmetry group of the plain minimal-surface density.
pub fn check_unconstrained(
    lag: &MinSurfLagrangian,
    field: &VectorField,
    cfg: &SampleConfig,
) -> Result<NoetherAnalysis> {
    let unconstrained = lag.with_lambda(Lambda::Fixed(Rat::from_integer(0.into())));
    check_noether(&unconstrained, field, cfg)
}
