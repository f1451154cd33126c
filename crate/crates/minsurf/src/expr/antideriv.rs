//! Closed-form antidifferentiation over a deliberately log-free pattern
//! table.
//!
//! Integration is term-by-term after pulling out factors free of the
//! integration variable. A term integrates only when its variable-dependent
//! core matches one of:
//!
//!   1. `u^a` with `a != -1`
//!   2. `sin/cos/exp` of an argument linear in `u`
//!   3. `sin^m * cos` (or `cos^m * sin`) with a shared linear argument and
//!      `m != -1`
//!   4. `sin^m` or `cos^m` alone with integer `m >= 2` or `m = -2`
//!      (reduction formula)
//!   5. `u^n * sin/cos/exp` with integer `n >= 1` (integration by parts)
//!
//! The excluded boundary cases (`u^-1`, partner exponent `-1`, `m <= -3`)
//! are exactly the log-producing ones. That exclusion is a semantic choice,
//! not laziness: downstream, "gauge constructible" means constructible in
//! this elementary class, and terms whose antiderivatives need logarithms
//! are reported as pattern misses even when logs would cancel in a fuller
//! calculus.

use super::{Expr, Node, Rat, UnaryFn};
use crate::error::{Error, Result};
use num_traits::{One, Signed, ToPrimitive};

/// Antiderivative of `e` in `var`, up to a constant. Errors with
/// [`Error::IntegrationPatternMiss`] naming the first unmatched term.
pub fn antiderivative(e: &Expr, var: &str) -> Result<Expr> {
    let terms = e.summands();
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        out.push(integrate_term(&t, var)?);
    }
    Ok(Expr::add(out))
}

fn miss(term: &Expr, var: &str) -> Error {
    Error::IntegrationPatternMiss(format!("d{var}: {term}"))
}

fn integrate_term(term: &Expr, var: &str) -> Result<Expr> {
    let mut outer = Vec::new();
    let mut dep = Vec::new();
    for f in term.factors() {
        if f.contains_symbol(var) {
            dep.push(f);
        } else {
            outer.push(f);
        }
    }
    if dep.is_empty() {
        outer.push(Expr::sym(var));
        return Ok(Expr::mul(outer));
    }
    let core = integrate_core(&dep, var).ok_or_else(|| miss(term, var))?;
    outer.push(core);
    Ok(Expr::mul(outer))
}

/// One variable-dependent factor, destructured for table matching.
enum DepFactor {
    VarPow(Rat),
    FnPow(UnaryFn, Expr, Rat),
}

fn classify(dep: &[Expr], var: &str) -> Option<(Option<Rat>, Vec<(UnaryFn, Expr, Rat)>)> {
    let mut var_pow: Option<Rat> = None;
    let mut fns = Vec::new();
    for f in dep {
        let df = match f.node() {
            Node::Sym(s) if s == var => DepFactor::VarPow(Rat::one()),
            Node::Pow(b, e) => match b.node() {
                Node::Sym(s) if s == var => DepFactor::VarPow(e.clone()),
                Node::Fn(func, arg) => DepFactor::FnPow(*func, arg.clone(), e.clone()),
                _ => return None,
            },
            Node::Fn(func, arg) => DepFactor::FnPow(*func, arg.clone(), Rat::one()),
            _ => return None,
        };
        match df {
            DepFactor::VarPow(e) => {
                if var_pow.is_some() {
                    return None;
                }
                var_pow = Some(e);
            }
            DepFactor::FnPow(func, arg, e) => fns.push((func, arg, e)),
        }
    }
    Some((var_pow, fns))
}

fn integrate_core(dep: &[Expr], var: &str) -> Option<Expr> {
    let (var_pow, fns) = classify(dep, var)?;
    match (var_pow, fns.as_slice()) {
        // u^a
        (Some(a), []) => {
            if a == -Rat::one() {
                return None;
            }
            let a1 = a + Rat::one();
            Some(Expr::mul2(
                Expr::num_rat(Rat::one() / a1.clone()),
                Expr::pow(Expr::sym(var), a1),
            ))
        }
        // single f(c u + d)^m
        (None, [(func, arg, m)]) => {
            let (c, _d) = linear_in(arg, var)?;
            if m.is_one() {
                return simple_fn(*func, arg, &c);
            }
            match func {
                UnaryFn::Sin | UnaryFn::Cos => {
                    if !m.is_integer() {
                        return None;
                    }
                    let mi = m.to_integer().to_i64()?;
                    if mi >= 2 || mi == -2 {
                        let s = trig_power_reduction(*func, arg, mi)?;
                        Some(Expr::div(s, c))
                    } else {
                        None
                    }
                }
                _ => None,
            }
        }
        // sin^m cos or cos^m sin with shared argument
        (None, [a, b]) if a.1 == b.1 => {
            let arg = &a.1;
            let (c, _d) = linear_in(arg, var)?;
            let pick = |pow_fn: &(UnaryFn, Expr, Rat), partner: &(UnaryFn, Expr, Rat)| {
                partner_rule(pow_fn.0, &pow_fn.2, partner.0, arg, &c)
            };
            if b.2.is_one() {
                pick(a, b).or_else(|| if a.2.is_one() { pick(b, a) } else { None })
            } else if a.2.is_one() {
                pick(b, a)
            } else {
                None
            }
        }
        // u^n f(c u + d), integer n >= 1: integrate by parts
        (Some(n), [(func, arg, m)]) if m.is_one() => {
            if !n.is_integer() || !n.is_positive() {
                return None;
            }
            let ni = n.to_integer().to_i64()?;
            let (c, _d) = linear_in(arg, var)?;
            let g = simple_fn(*func, arg, &c)?;
            // u^n G - n * int(u^(n-1) G)
            let tail = Expr::mul(vec![
                Expr::num_i(ni),
                Expr::powi(Expr::sym(var), ni - 1),
                g.clone(),
            ]);
            let rest = antiderivative(&tail, var).ok()?;
            Some(Expr::sub(
                Expr::mul2(Expr::powi(Expr::sym(var), ni), g),
                rest,
            ))
        }
        _ => None,
    }
}

/// Antiderivative of sin/cos/exp with linear argument; log and abs have no
/// entry.
fn simple_fn(func: UnaryFn, arg: &Expr, c: &Expr) -> Option<Expr> {
    let body = match func {
        UnaryFn::Sin => Expr::neg(Expr::cos(arg.clone())),
        UnaryFn::Cos => Expr::sin(arg.clone()),
        UnaryFn::Exp => Expr::exp(arg.clone()),
        UnaryFn::Log | UnaryFn::Abs => return None,
    };
    Some(Expr::div(body, c.clone()))
}

/// `base^m * partner` where partner is the derivative-partner trig factor:
/// `sin^m cos -> sin^(m+1)/(m+1)`, `cos^m sin -> -cos^(m+1)/(m+1)`.
fn partner_rule(base: UnaryFn, m: &Rat, partner: UnaryFn, arg: &Expr, c: &Expr) -> Option<Expr> {
    if *m == -Rat::one() {
        return None;
    }
    let m1 = m.clone() + Rat::one();
    match (base, partner) {
        (UnaryFn::Sin, UnaryFn::Cos) => Some(Expr::div(
            Expr::mul2(
                Expr::num_rat(Rat::one() / m1.clone()),
                Expr::pow(Expr::sin(arg.clone()), m1),
            ),
            c.clone(),
        )),
        (UnaryFn::Cos, UnaryFn::Sin) => Some(Expr::div(
            Expr::mul2(
                Expr::num_rat(-Rat::one() / m1.clone()),
                Expr::pow(Expr::cos(arg.clone()), m1),
            ),
            c.clone(),
        )),
        _ => None,
    }
}

/// `int f^m(w) dw` in the argument variable `w`, for integer `m >= 0` or
/// `m = -2`. The `m >= 2` branch is the standard reduction formula; odd
/// negative powers would bottom out at `m = -1`, which is log-class.
fn trig_power_reduction(func: UnaryFn, arg: &Expr, m: i64) -> Option<Expr> {
    match m {
        -2 => Some(match func {
            // int sin^-2 = -cot, int cos^-2 = tan
            UnaryFn::Sin => Expr::neg(Expr::cot(arg.clone())),
            UnaryFn::Cos => Expr::tan(arg.clone()),
            _ => return None,
        }),
        0 => Some(arg.clone()),
        1 => match func {
            UnaryFn::Sin => Some(Expr::neg(Expr::cos(arg.clone()))),
            UnaryFn::Cos => Some(Expr::sin(arg.clone())),
            _ => None,
        },
        m if m >= 2 => {
            let rest = trig_power_reduction(func, arg, m - 2)?;
            let (lead, sign) = match func {
                UnaryFn::Sin => (
                    Expr::mul2(
                        Expr::pow(Expr::sin(arg.clone()), super::rat_i(m - 1)),
                        Expr::cos(arg.clone()),
                    ),
                    -1,
                ),
                UnaryFn::Cos => (
                    Expr::mul2(
                        Expr::pow(Expr::cos(arg.clone()), super::rat_i(m - 1)),
                        Expr::sin(arg.clone()),
                    ),
                    1,
                ),
                _ => return None,
            };
            Some(Expr::add2(
                Expr::mul2(Expr::frac(sign, m), lead),
                Expr::mul2(Expr::frac(m - 1, m), rest),
            ))
        }
        _ => None,
    }
}

/// Decompose `arg = c*var + d` with `c`, `d` free of `var`; `None` when the
/// argument is not linear.
fn linear_in(arg: &Expr, var: &str) -> Option<(Expr, Expr)> {
    let mut c_parts = Vec::new();
    let mut d_parts = Vec::new();
    for t in arg.summands() {
        if !t.contains_symbol(var) {
            d_parts.push(t);
            continue;
        }
        let mut cof = Vec::new();
        let mut seen_var = false;
        for f in t.factors() {
            match f.node() {
                Node::Sym(s) if s == var => {
                    if seen_var {
                        return None;
                    }
                    seen_var = true;
                }
                _ if f.contains_symbol(var) => return None,
                _ => cof.push(f),
            }
        }
        if !seen_var {
            return None;
        }
        c_parts.push(Expr::mul(cof));
    }
    if c_parts.is_empty() {
        return None;
    }
    Some((Expr::add(c_parts), Expr::add(d_parts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{diff, is_zero, rat, ZeroVerdict};
    use crate::sample::SampleConfig;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    fn check_table(e: &Expr, var: &str) {
        let f = antiderivative(e, var).unwrap_or_else(|err| panic!("missed {e}: {err}"));
        let back = Expr::sub(diff(&f, var), e.clone());
        let v = is_zero(&back, &SampleConfig::default(), &[Expr::sin(s(var))]).unwrap();
        assert_eq!(v, ZeroVerdict::Zero, "d/d{var} {f} != {e}");
    }

    #[test]
    fn power_rule_with_cofactors() {
        check_table(&Expr::mul(vec![s("a"), Expr::powi(s("r"), 3)]), "r");
        check_table(&Expr::pow(s("r"), rat(-8, 3)), "r");
        check_table(&s("a"), "r");
        assert_eq!(
            antiderivative(&Expr::powi(s("r"), 2), "r").unwrap(),
            Expr::mul2(Expr::frac(1, 3), Expr::powi(s("r"), 3))
        );
    }

    #[test]
    fn reciprocal_is_a_miss() {
        let e = Expr::powi(s("r"), -1);
        assert!(matches!(
            antiderivative(&e, "r"),
            Err(Error::IntegrationPatternMiss(_))
        ));
    }

    #[test]
    fn linear_argument_trig() {
        check_table(&Expr::sin(s("x")), "x");
        let arg = Expr::add2(Expr::mul2(Expr::num_i(3), s("x")), s("b"));
        check_table(&Expr::cos(arg.clone()), "x");
        check_table(&Expr::exp(arg), "x");
        // nonlinear argument misses
        assert!(antiderivative(&Expr::sin(Expr::powi(s("x"), 2)), "x").is_err());
    }

    #[test]
    fn partner_products() {
        check_table(
            &Expr::mul2(Expr::powi(Expr::sin(s("x")), 4), Expr::cos(s("x"))),
            "x",
        );
        check_table(
            &Expr::mul2(Expr::powi(Expr::cos(s("x")), -3), Expr::sin(s("x"))),
            "x",
        );
        check_table(&Expr::mul2(Expr::sin(s("x")), Expr::cos(s("x"))), "x");
        // sin^-1 * cos would be log(sin)
        let e = Expr::mul2(Expr::powi(Expr::sin(s("x")), -1), Expr::cos(s("x")));
        assert!(antiderivative(&e, "x").is_err());
    }

    #[test]
    fn trig_power_reductions() {
        check_table(&Expr::powi(Expr::sin(s("x")), 2), "x");
        check_table(&Expr::powi(Expr::sin(s("x")), 5), "x");
        check_table(&Expr::powi(Expr::cos(s("x")), 4), "x");
        check_table(&Expr::powi(Expr::sin(s("x")), -2), "x");
        check_table(&Expr::powi(Expr::cos(s("x")), -2), "x");
        // sin^-3 reduces toward sin^-1: log-class, miss
        assert!(antiderivative(&Expr::powi(Expr::sin(s("x")), -3), "x").is_err());
    }

    #[test]
    fn by_parts() {
        check_table(&Expr::mul2(s("x"), Expr::sin(s("x"))), "x");
        check_table(
            &Expr::mul2(
                Expr::powi(s("x"), 3),
                Expr::exp(Expr::mul2(Expr::num_i(2), s("x"))),
            ),
            "x",
        );
        // x * sin^-2(x) is the obstruction class seen in sphere gauge
        // integrands: not by-parts eligible here
        let e = Expr::mul2(s("x"), Expr::powi(Expr::sin(s("x")), -2));
        assert!(antiderivative(&e, "x").is_err());
    }

    #[test]
    fn term_by_term_with_outer_factors() {
        // (r^3 sin(th)/3) * d/dr of a translation component: the volume-form
        // times field-derivative shape that gauge construction integrates
        let e = Expr::mul(vec![
            Expr::frac(1, 3),
            Expr::powi(s("r"), 3),
            Expr::sin(s("th")),
            Expr::mul2(Expr::sin(s("th")), Expr::powi(s("r"), -2)),
        ]);
        let f = antiderivative(&e, "r").unwrap();
        let want = Expr::mul(vec![
            Expr::frac(1, 6),
            Expr::powi(s("r"), 2),
            Expr::powi(Expr::sin(s("th")), 2),
        ]);
        assert_eq!(f, want);
    }

    #[test]
    fn miss_reports_term() {
        let e = Expr::add2(Expr::powi(s("x"), 2), Expr::log(s("x")));
        match antiderivative(&e, "x") {
            Err(Error::IntegrationPatternMiss(msg)) => {
                assert!(msg.contains("log(x)"), "msg: {msg}");
            }
            other => panic!("expected miss, got {other:?}"),
        }
    }
}
