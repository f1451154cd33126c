//! Symbolic partial differentiation.

use super::{Expr, Node, Rat, UnaryFn};
use num_traits::One;
use std::collections::BTreeMap;

/// Closure rules for opaque functions: `name -> (argument variable, expression
/// for the first derivative)`. A rule lets `name'` rewrite to a concrete
/// expression instead of accumulating prime orders, e.g. `W' = a^3` for a
/// potential defined by quadrature.
pub type DiffRules = BTreeMap<String, (String, Expr)>;

pub fn diff(e: &Expr, var: &str) -> Expr {
    diff_with(e, var, &DiffRules::new())
}

pub fn diff_with(e: &Expr, var: &str, rules: &DiffRules) -> Expr {
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => {
            if s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Pow(b, n) => {
            let db = diff_with(b, var, rules);
            if db.is_lit_zero() {
                return Expr::zero();
            }
            // d(b^n) = n b^(n-1) db
            Expr::mul(vec![
                Expr::num_rat(n.clone()),
                Expr::pow(b.clone(), n.clone() - Rat::one()),
                db,
            ])
        }
        Node::Fn(f, a) => {
            let da = diff_with(a, var, rules);
            if da.is_lit_zero() {
                return Expr::zero();
            }
            let outer = match f {
                UnaryFn::Sin => Expr::cos(a.clone()),
                UnaryFn::Cos => Expr::neg(Expr::sin(a.clone())),
                UnaryFn::Exp => e.clone(),
                UnaryFn::Log => Expr::powi(a.clone(), -1),
                // d|a| = |a| / a * da, valid away from a = 0
                UnaryFn::Abs => Expr::mul2(Expr::abs(a.clone()), Expr::powi(a.clone(), -1)),
            };
            Expr::mul2(outer, da)
        }
        Node::Opaque { name, order, arg } => {
            let darg = diff_with(arg, var, rules);
            if darg.is_lit_zero() {
                return Expr::zero();
            }
            let derived = match rules.get(name) {
                Some((argvar, rhs)) if *order == 0 => {
                    super::substitute(rhs, argvar, arg)
                }
                _ => Expr::opaque(name, order + 1, arg.clone()),
            };
            Expr::mul2(derived, darg)
        }
        Node::Prod(fs) => {
            let mut terms = Vec::new();
            for (i, fi) in fs.iter().enumerate() {
                let dfi = diff_with(fi, var, rules);
                if dfi.is_lit_zero() {
                    continue;
                }
                let mut part = vec![dfi];
                for (j, fj) in fs.iter().enumerate() {
                    if j != i {
                        part.push(fj.clone());
                    }
                }
                terms.push(Expr::mul(part));
            }
            Expr::add(terms)
        }
        Node::Sum(ts) => Expr::add(ts.iter().map(|t| diff_with(t, var, rules)).collect()),
    }
}
