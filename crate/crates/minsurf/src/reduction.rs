//! Symmetry reduction of the constrained minimal-surface equation.
//!
//! Reducing by a set of commuting coordinate translations means assuming the
//! graph function does not vary along those directions: every jet with
//! respect to an eliminated coordinate is set to zero and the coordinate is
//! dropped. Only pure translations are supported; general zero-order
//! invariants would need a characteristic solver. The surviving problem is
//! written in the canonical names `s`, `s_x`, `s_xx` over the independent
//! variable `x`, whatever the original coordinates were called.
//!
//! The reduced equation is compared against reference forms only up to an
//! overall constant factor, because printed equations usually have their
//! denominators cleared by an unstated multiplier. [`normalize_for_comparison`]
//! clears sum-based negative powers (after pulling positive monomial content
//! out of radicands) so that the ratio against a cleared reference form is a
//! constant, and [`compare_up_to_factor`] estimates that constant by
//! sampling.

use crate::error::{Error, Result};
use crate::expr::{
    eval, expand, is_zero, substitute_many, Expr, Node, Rat, ZeroVerdict,
};
use crate::geometry::{SplitMetric, VectorField};
use crate::noether::{jet, jet2};
use crate::sample::{SampleConfig, MAX_REDRAWS};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Canonical dependent-variable name of a reduced problem.
pub const REDUCED_DEP: &str = "s";
/// Canonical independent-variable name of a reduced problem.
pub const REDUCED_INDEP: &str = "x";
/// First and second jets in the canonical names.
pub const REDUCED_JET1: &str = "s_x";
pub const REDUCED_JET2: &str = "s_xx";

/// Relative tolerance for the proportionality verdict.
pub const PROPORTIONALITY_REL_TOL: f64 = 1e-8;

/// Reference form of the dust-era profile equation, quoted from the
/// published reduction; equality is expected only up to an overall constant.
pub const DUST_REFERENCE_ODE: &str = "3*s^(8/3)*s_xx - 8*s^(5/3)*s_x^2 - 6*s^3 \
     - 3*lambda*(s^2 + s^(2/3)*s_x^2)*(s^4 + s^(8/3)*s_x^2)^(1/2)";

/// The parsed [`DUST_REFERENCE_ODE`].
pub fn dust_reference_ode() -> Expr {
    crate::expr::parse(DUST_REFERENCE_ODE).expect("reference equation is well-formed")
}

#[derive(Debug, Clone)]
pub struct ReducedProblem {
    /// Original name of the surviving slice coordinate (canonical `x`).
    pub surviving: String,
    /// Original name of the dependent variable (canonical `s`).
    pub dependent: String,
    /// Eliminated coordinates, in the order given.
    pub eliminated: Vec<String>,
    /// Names of the symmetries used, in the order given.
    pub symmetries: Vec<String>,
    /// The reduced equation in `x`, `s`, `s_x`, `s_xx`, canonicalized.
    pub ode: Expr,
}

/// Synthesize the unit translation field along a named slice coordinate.
pub fn translation_field(metric: &SplitMetric, coord: &str) -> Result<VectorField> {
    if coord == metric.u {
        return Err(Error::NotTranslation(format!(
            "{coord} is the dependent variable of the graph, not a slice direction"
        )));
    }
    let Some(k) = metric.coord_index(coord) else {
        return Err(Error::NotTranslation(format!(
            "{coord} is not a slice coordinate of {}",
            metric.name
        )));
    };
    let mut xi = vec![Expr::zero(); metric.dim()];
    xi[k] = Expr::one();
    Ok(VectorField::new(&format!("d/d{coord}"), Expr::zero(), xi))
}

/// Commutator `[a, b]` of two fields on the full `(u, x)` manifold,
/// differentiating with the metric's opaque closure rules.
pub fn commutator(metric: &SplitMetric, a: &VectorField, b: &VectorField) -> VectorField {
    let apply = |f: &VectorField, g: &Expr| -> Expr {
        let mut terms = vec![Expr::mul2(f.eta.clone(), metric.diff(g, &metric.u))];
        for (i, c) in metric.coords.iter().enumerate() {
            terms.push(Expr::mul2(f.xi[i].clone(), metric.diff(g, c)));
        }
        Expr::add(terms)
    };
    let eta = Expr::sub(apply(a, &b.eta), apply(b, &a.eta));
    let xi = (0..metric.dim())
        .map(|k| Expr::sub(apply(a, &b.xi[k]), apply(b, &a.xi[k])))
        .collect();
    VectorField::new(&format!("[{}, {}]", a.name, b.name), eta, xi)
}

/// The coordinate a pure translation field points along, or the reason it
/// is not one.
fn translation_direction(metric: &SplitMetric, f: &VectorField) -> Result<usize> {
    if !f.eta.is_lit_zero() {
        return Err(Error::NotTranslation(format!(
            "{}: has a component along the dependent variable",
            f.name
        )));
    }
    let mut direction = None;
    for (k, comp) in f.xi.iter().enumerate() {
        if comp.is_lit_zero() {
            continue;
        }
        if !comp.free_symbols().is_empty() {
            return Err(Error::NotTranslation(format!(
                "{}: component along {} is not constant",
                f.name, metric.coords[k]
            )));
        }
        if direction.replace(k).is_some() {
            return Err(Error::NotTranslation(format!(
                "{}: points along more than one coordinate",
                f.name
            )));
        }
    }
    direction.ok_or_else(|| Error::NotTranslation(format!("{}: the zero field", f.name)))
}

/// Reduce a jet expression (typically the Euler-Lagrange residual of a
/// [`crate::noether::MinSurfLagrangian`]) by commuting coordinate
/// translations. Exactly one slice coordinate must survive.
pub fn reduce(
    metric: &SplitMetric,
    pde: &Expr,
    symmetries: &[VectorField],
    cfg: &SampleConfig,
) -> Result<ReducedProblem> {
    if symmetries.is_empty() {
        return Err(Error::ValidationError(
            "reduction needs at least one symmetry".into(),
        ));
    }
    let scfg = metric.sampling(cfg);

    // Commutation first, on the fields as given: a non-commuting selection
    // is wrong regardless of what else is wrong with it.
    for i in 0..symmetries.len() {
        for j in (i + 1)..symmetries.len() {
            let br = commutator(metric, &symmetries[i], &symmetries[j]);
            let mut parts = vec![br.eta.clone()];
            parts.extend(br.xi.iter().cloned());
            for p in parts {
                match is_zero(&p, &scfg, &metric.singular)? {
                    ZeroVerdict::Zero => {}
                    _ => {
                        return Err(Error::NonCommuting(format!(
                            "[{}, {}] is not zero",
                            symmetries[i].name, symmetries[j].name
                        )))
                    }
                }
            }
        }
    }

    let mut eliminated = Vec::with_capacity(symmetries.len());
    for f in symmetries {
        let k = translation_direction(metric, f)?;
        let coord = metric.coords[k].clone();
        if eliminated.contains(&coord) {
            return Err(Error::ValidationError(format!(
                "coordinate {coord} eliminated twice"
            )));
        }
        eliminated.push(coord);
    }

    let survivors: Vec<String> = metric
        .coords
        .iter()
        .filter(|c| !eliminated.contains(c))
        .cloned()
        .collect();
    let [survivor] = survivors.as_slice() else {
        return Err(Error::ValidationError(format!(
            "reduction must leave exactly one slice coordinate, left {}",
            survivors.len()
        )));
    };

    // Zero every jet that involves an eliminated coordinate.
    let u = &metric.u;
    let mut map: BTreeMap<String, Expr> = BTreeMap::new();
    for c in &eliminated {
        map.insert(jet(u, c), Expr::zero());
    }
    for i in 0..metric.dim() {
        for j in i..metric.dim() {
            let ci = &metric.coords[i];
            let cj = &metric.coords[j];
            if eliminated.contains(ci) || eliminated.contains(cj) {
                map.insert(jet2(u, &metric.coords, i, j), Expr::zero());
            }
        }
    }
    let reduced = substitute_many(pde, &map);

    let free = reduced.free_symbols();
    let leftover: Vec<&String> = eliminated.iter().filter(|c| free.contains(*c)).collect();
    if let Some(first) = leftover.first() {
        return Err(Error::ResidualDependence(format!(
            "still depends on {first} after substituting zero derivatives"
        )));
    }

    // Rename to the canonical reduced variables. A user metric could name a
    // coordinate so the renaming collides; refuse rather than capture.
    let renames = [
        (u.clone(), REDUCED_DEP.to_string()),
        (jet(u, survivor), REDUCED_JET1.to_string()),
        (
            jet2(
                u,
                &metric.coords,
                metric.coord_index(survivor).unwrap(),
                metric.coord_index(survivor).unwrap(),
            ),
            REDUCED_JET2.to_string(),
        ),
        (survivor.clone(), REDUCED_INDEP.to_string()),
    ];
    for (src, dst) in &renames {
        if src != dst && free.contains(dst) {
            return Err(Error::ValidationError(format!(
                "coordinate names collide with the canonical reduced name {dst}"
            )));
        }
    }
    let rename_map: BTreeMap<String, Expr> = renames
        .iter()
        .filter(|(src, dst)| src != dst)
        .map(|(src, dst)| (src.clone(), Expr::sym(dst)))
        .collect();
    let ode = substitute_many(&reduced, &rename_map);

    Ok(ReducedProblem {
        surviving: survivor.clone(),
        dependent: u.clone(),
        eliminated,
        symmetries: symmetries.iter().map(|f| f.name.clone()).collect(),
        ode,
    })
}

/// Pull declared-positive monomial content out of every sum raised to a
/// power, then clear sum-based negative powers by multiplying through and
/// redistributing. The result equals the input times a positive factor on
/// the region where the `positive` symbols are positive, which is what an
/// up-to-a-factor comparison needs.
pub fn normalize_for_comparison(e: &Expr, positive: &[&str]) -> Expr {
    let mut cur = extract_radicand_monomials(&expand(e), positive);
    for _ in 0..8 {
        let clearing = sum_negative_powers(&cur);
        if clearing.is_empty() {
            break;
        }
        for (base, emin) in clearing {
            let factor = Expr::pow(base, -emin);
            cur = expand(&Expr::mul2(cur, factor));
        }
        cur = extract_radicand_monomials(&cur, positive);
    }
    cur
}

/// Rewrite `(m * rest)^r -> m^r * rest^r` for every sum base, where `m` is
/// the common monomial in the declared-positive symbols.
fn extract_radicand_monomials(e: &Expr, positive: &[&str]) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Sum(ts) => Expr::add(
            ts.iter()
                .map(|t| extract_radicand_monomials(t, positive))
                .collect(),
        ),
        Node::Prod(fs) => Expr::mul(
            fs.iter()
                .map(|f| extract_radicand_monomials(f, positive))
                .collect(),
        ),
        Node::Fn(f, a) => Expr::fn_of(*f, extract_radicand_monomials(a, positive)),
        Node::Opaque { name, order, arg } => {
            Expr::opaque(name, *order, extract_radicand_monomials(arg, positive))
        }
        Node::Pow(b, r) => {
            let base = extract_radicand_monomials(b, positive);
            let Node::Sum(terms) = base.node() else {
                return Expr::pow(base, r.clone());
            };
            let content = common_monomial(terms, positive);
            if content.is_empty() {
                return Expr::pow(base, r.clone());
            }
            let peel: Vec<Expr> = content
                .iter()
                .map(|(s, p)| Expr::pow(Expr::sym(s), -p.clone()))
                .collect();
            let stripped = Expr::add(
                terms
                    .iter()
                    .map(|t| Expr::mul2(t.clone(), Expr::mul(peel.clone())))
                    .collect(),
            );
            let mut out: Vec<Expr> = content
                .iter()
                .map(|(s, p)| Expr::pow(Expr::sym(s), p.clone() * r.clone()))
                .collect();
            out.push(Expr::pow(stripped, r.clone()));
            Expr::mul(out)
        }
    }
}

/// Common power of each declared-positive symbol across all summands;
/// exponent 0 entries are dropped.
fn common_monomial(terms: &[Expr], positive: &[&str]) -> BTreeMap<String, Rat> {
    let mut common: Option<BTreeMap<String, Rat>> = None;
    for t in terms {
        let mut powers: BTreeMap<String, Rat> = BTreeMap::new();
        for f in t.factors() {
            match f.node() {
                Node::Sym(s) if positive.contains(&s.as_str()) => {
                    *powers.entry(s.clone()).or_insert_with(Rat::zero) += Rat::from_integer(1.into());
                }
                Node::Pow(b, r) => {
                    if let Node::Sym(s) = b.node() {
                        if positive.contains(&s.as_str()) {
                            *powers.entry(s.clone()).or_insert_with(Rat::zero) += r.clone();
                        }
                    }
                }
                _ => {}
            }
        }
        common = Some(match common {
            None => powers,
            Some(acc) => acc
                .into_iter()
                .filter_map(|(s, p)| {
                    let q = powers.get(&s).cloned().unwrap_or_else(Rat::zero);
                    let m = if q < p { q } else { p };
                    (!m.is_zero()).then_some((s, m))
                })
                .collect(),
        });
        if common.as_ref().is_some_and(|c| c.is_empty()) {
            break;
        }
    }
    common.unwrap_or_default()
}

/// Most negative exponent per sum base among top-level product factors.
fn sum_negative_powers(e: &Expr) -> BTreeMap<Expr, Rat> {
    let mut worst: BTreeMap<Expr, Rat> = BTreeMap::new();
    for term in e.summands() {
        for f in term.factors() {
            if let Node::Pow(b, r) = f.node() {
                if r.is_negative() && matches!(b.node(), Node::Sum(_)) {
                    worst
                        .entry(b.clone())
                        .and_modify(|w| {
                            if r < w {
                                *w = r.clone();
                            }
                        })
                        .or_insert_with(|| r.clone());
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub enum Proportionality {
    /// `e1 ≈ factor * e2` across all samples.
    Proportional { factor: f64 },
    NotProportional { reason: String },
}

/// Sample both expressions over their joint free symbols and decide whether
/// their ratio is one constant. `0/0` points are redrawn; a point where only
/// one side vanishes refutes proportionality.
pub fn compare_up_to_factor(
    e1: &Expr,
    e2: &Expr,
    cfg: &SampleConfig,
) -> Result<Proportionality> {
    const BOTH_ZERO: f64 = 1e-13;

    let mut syms: BTreeSet<String> = e1.free_symbols();
    syms.extend(e2.free_symbols());
    let mut rng = cfg.rng();
    let mut factor: Option<f64> = None;

    for _ in 0..cfg.n {
        let mut drawn = None;
        let mut last_err = None;
        for _ in 0..MAX_REDRAWS {
            let point = cfg.sample_point(&syms, &mut rng);
            match (eval(e1, &point), eval(e2, &point)) {
                (Ok(v1), Ok(v2)) => {
                    if v1.abs() <= BOTH_ZERO && v2.abs() <= BOTH_ZERO {
                        continue;
                    }
                    drawn = Some((v1, v2, point));
                    break;
                }
                (Err(e), _) | (_, Err(e)) => {
                    last_err = Some(e);
                    continue;
                }
            }
        }
        let Some((v1, v2, point)) = drawn else {
            return match last_err {
                Some(e) => Err(e),
                None => Ok(Proportionality::NotProportional {
                    reason: "both sides vanish at every sampled point".into(),
                }),
            };
        };

        if (v1.abs() <= BOTH_ZERO) != (v2.abs() <= BOTH_ZERO) {
            return Ok(Proportionality::NotProportional {
                reason: format!("one side vanishes where the other does not, at {point:?}"),
            });
        }
        let r = v1 / v2;
        match factor {
            None => factor = Some(r),
            Some(f) => {
                if (r - f).abs() > PROPORTIONALITY_REL_TOL * f.abs().max(r.abs()) {
                    return Ok(Proportionality::NotProportional {
                        reason: format!("ratio drifts from {f} to {r}"),
                    });
                }
            }
        }
    }

    Ok(Proportionality::Proportional {
        factor: factor.expect("at least one sample"),
    })
}
