//! Structural substitution. Results pass back through the canonicalizing
//! constructors, so substitution can simplify (e.g. sin(x) with x -> 0).

use super::{opaque_key, Expr, Node};
use std::collections::BTreeMap;

pub fn substitute(e: &Expr, var: &str, replacement: &Expr) -> Expr {
    let mut map = BTreeMap::new();
    map.insert(var.to_string(), replacement.clone());
    substitute_many(e, &map)
}

/// Simultaneous substitution of symbols: occurrences inside replacements are
/// not rewritten again.
pub fn substitute_many(e: &Expr, map: &BTreeMap<String, Expr>) -> Expr {
    match e.node() {
        Node::Num(_) => e.clone(),
        Node::Sym(s) => map.get(s).cloned().unwrap_or_else(|| e.clone()),
        Node::Pow(b, n) => Expr::pow(substitute_many(b, map), n.clone()),
        Node::Fn(f, a) => {
            let a2 = substitute_many(a, map);
            match f {
                super::UnaryFn::Sin => Expr::sin(a2),
                super::UnaryFn::Cos => Expr::cos(a2),
                super::UnaryFn::Exp => Expr::exp(a2),
                super::UnaryFn::Log => Expr::log(a2),
                super::UnaryFn::Abs => Expr::abs(a2),
            }
        }
        Node::Opaque { name, order, arg } => {
            Expr::opaque(name, *order, substitute_many(arg, map))
        }
        Node::Prod(fs) => Expr::mul(fs.iter().map(|f| substitute_many(f, map)).collect()),
        Node::Sum(ts) => Expr::add(ts.iter().map(|t| substitute_many(t, map)).collect()),
    }
}

/// Replace whole opaque applications by expressions, keyed by prime-order
/// name (`"a"`, `"a'"`, ...). Used to specialize a metric family to an
/// explicit member, e.g. a(t) -> t^(2/3).
pub fn substitute_opaque(e: &Expr, map: &BTreeMap<String, Expr>) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Pow(b, n) => Expr::pow(substitute_opaque(b, map), n.clone()),
        Node::Fn(f, a) => {
            let a2 = substitute_opaque(a, map);
            match f {
                super::UnaryFn::Sin => Expr::sin(a2),
                super::UnaryFn::Cos => Expr::cos(a2),
                super::UnaryFn::Exp => Expr::exp(a2),
                super::UnaryFn::Log => Expr::log(a2),
                super::UnaryFn::Abs => Expr::abs(a2),
            }
        }
        Node::Opaque { name, order, arg } => match map.get(&opaque_key(name, *order)) {
            Some(rep) => rep.clone(),
            None => Expr::opaque(name, *order, substitute_opaque(arg, map)),
        },
        Node::Prod(fs) => Expr::mul(fs.iter().map(|f| substitute_opaque(f, map)).collect()),
        Node::Sum(ts) => Expr::add(ts.iter().map(|t| substitute_opaque(t, map)).collect()),
    }
}
