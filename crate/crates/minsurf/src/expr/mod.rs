//! Immutable symbolic expression trees over exact rational constants.
//!
//! Every public constructor canonicalizes: sums and products are flattened,
//! argument-sorted, constant-folded, and like terms/powers merged, so
//! structural equality decides canonical equality. Quotients are negative
//! powers; there is no division node.

mod antideriv;
mod diff;
mod expand;
mod eval;
mod parse;
mod print;
mod subst;
mod zero;

pub use antideriv::antiderivative;
pub use expand::expand;
pub use diff::{diff, diff_with, DiffRules};
pub use eval::{eval, Bindings};
pub use parse::{parse, rat_from_decimal};
pub use subst::{substitute, substitute_many, substitute_opaque};
pub use zero::{is_zero, residual_norm, Witness, ZeroVerdict};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

pub type Rat = num_rational::BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryFn {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Abs => "abs",
        }
    }
}

/// Expression node. `tan`, `cot`, `sqrt` are accepted by the parser and the
/// constructor API but desugar on construction (`tan x = sin x * cos x ^ -1`,
/// `sqrt x = x^(1/2)`), keeping differentiation and evaluation total on five
/// function kinds. `Opaque` is an undetermined function application such as
/// `nu(R)`; `order` counts primes, so `nu'(R)` is order 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rat),
    Sym(String),
    Pow(Expr, Rat),
    Fn(UnaryFn, Expr),
    Opaque { name: String, order: u32, arg: Expr },
    Prod(Vec<Expr>),
    Sum(Vec<Expr>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl Expr {
    fn raw(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num_i(n: i64) -> Expr {
        Expr::raw(Node::Num(rat_i(n)))
    }

    pub fn num_rat(r: Rat) -> Expr {
        Expr::raw(Node::Num(r))
    }

    pub fn frac(p: i64, q: i64) -> Expr {
        Expr::raw(Node::Num(rat(p, q)))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::raw(Node::Sym(name.to_string()))
    }

    pub fn zero() -> Expr {
        Expr::num_i(0)
    }

    pub fn one() -> Expr {
        Expr::num_i(1)
    }

    pub fn is_lit_zero(&self) -> bool {
        matches!(self.node(), Node::Num(n) if n.is_zero())
    }

    pub fn is_lit_one(&self) -> bool {
        matches!(self.node(), Node::Num(n) if n.is_one())
    }

    pub fn as_num(&self) -> Option<&Rat> {
        match self.node() {
            Node::Num(n) => Some(n),
            _ => None,
        }
    }

    /// Top-level summands (the expression itself when not a sum).
    pub fn summands(&self) -> Vec<Expr> {
        match self.node() {
            Node::Sum(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Top-level factors (the expression itself when not a product).
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Prod(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Free symbols, with opaque applications contributing their binding key
    /// (`name` plus one `'` per derivative order) as well as argument symbols.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.collect_symbols(&mut set);
        set
    }

    fn collect_symbols(&self, set: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                set.insert(s.clone());
            }
            Node::Pow(b, _) => b.collect_symbols(set),
            Node::Fn(_, a) => a.collect_symbols(set),
            Node::Opaque { name, order, arg } => {
                set.insert(opaque_key(name, *order));
                arg.collect_symbols(set);
            }
            Node::Prod(cs) | Node::Sum(cs) => {
                for c in cs {
                    c.collect_symbols(set);
                }
            }
        }
    }

    pub fn contains_symbol(&self, s: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(name) => name == s,
            Node::Pow(b, _) => b.contains_symbol(s),
            Node::Fn(_, a) => a.contains_symbol(s),
            Node::Opaque { name, order, arg } => {
                opaque_key(name, *order) == s || arg.contains_symbol(s)
            }
            Node::Prod(cs) | Node::Sum(cs) => cs.iter().any(|c| c.contains_symbol(s)),
        }
    }

    // ---- canonicalizing constructors ----

    pub fn add(terms: Vec<Expr>) -> Expr {
        canon_add(terms)
    }

    pub fn add2(a: Expr, b: Expr) -> Expr {
        canon_add(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        canon_add(vec![a, Expr::neg(b)])
    }

    pub fn neg(a: Expr) -> Expr {
        canon_mul(vec![Expr::num_i(-1), a])
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        canon_mul(factors)
    }

    pub fn mul2(a: Expr, b: Expr) -> Expr {
        canon_mul(vec![a, b])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        canon_mul(vec![a, canon_pow(b, rat_i(-1))])
    }

    pub fn pow(base: Expr, e: Rat) -> Expr {
        canon_pow(base, e)
    }

    pub fn powi(base: Expr, e: i64) -> Expr {
        canon_pow(base, rat_i(e))
    }

    pub fn sqrt(base: Expr) -> Expr {
        canon_pow(base, rat(1, 2))
    }

    pub fn sin(a: Expr) -> Expr {
        canon_fn(UnaryFn::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        canon_fn(UnaryFn::Cos, a)
    }

    pub fn tan(a: Expr) -> Expr {
        Expr::mul2(Expr::sin(a.clone()), Expr::powi(Expr::cos(a), -1))
    }

    pub fn cot(a: Expr) -> Expr {
        Expr::mul2(Expr::cos(a.clone()), Expr::powi(Expr::sin(a), -1))
    }

    pub fn exp(a: Expr) -> Expr {
        canon_fn(UnaryFn::Exp, a)
    }

    pub fn log(a: Expr) -> Expr {
        canon_fn(UnaryFn::Log, a)
    }

    pub fn abs(a: Expr) -> Expr {
        canon_fn(UnaryFn::Abs, a)
    }

    pub fn opaque(name: &str, order: u32, arg: Expr) -> Expr {
        Expr::raw(Node::Opaque { name: name.to_string(), order, arg })
    }

    /// Canonical application of a function kind to an argument.
    pub fn fn_of(f: UnaryFn, arg: Expr) -> Expr {
        canon_fn(f, arg)
    }

    /// Rebuild through the canonicalizing constructors. Identity on already
    /// canonical trees; used to normalize raw trees and in idempotence tests.
    pub fn canonicalize(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Pow(b, e) => canon_pow(b.canonicalize(), e.clone()),
            Node::Fn(f, a) => canon_fn(*f, a.canonicalize()),
            Node::Opaque { name, order, arg } => {
                Expr::opaque(name, *order, arg.canonicalize())
            }
            Node::Prod(cs) => canon_mul(cs.iter().map(|c| c.canonicalize()).collect()),
            Node::Sum(cs) => canon_add(cs.iter().map(|c| c.canonicalize()).collect()),
        }
    }
}

pub fn opaque_key(name: &str, order: u32) -> String {
    let mut k = name.to_string();
    for _ in 0..order {
        k.push('\'');
    }
    k
}

// ---- canonicalization internals ----

/// Split a canonical term into (rational coefficient, symbolic core).
/// The core of a pure number is 1.
fn coeff_core(t: &Expr) -> (Rat, Expr) {
    match t.node() {
        Node::Num(n) => (n.clone(), Expr::one()),
        Node::Prod(fs) => {
            if let Node::Num(n) = fs[0].node() {
                let rest: Vec<Expr> = fs[1..].to_vec();
                let core = if rest.len() == 1 {
                    rest.into_iter().next().unwrap()
                } else {
                    Expr::raw(Node::Prod(rest))
                };
                (n.clone(), core)
            } else {
                (Rat::one(), t.clone())
            }
        }
        _ => (Rat::one(), t.clone()),
    }
}

fn canon_add(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    let mut stack = terms;
    while let Some(t) = stack.pop() {
        match t.node() {
            Node::Sum(cs) => stack.extend(cs.iter().cloned()),
            _ => flat.push(t),
        }
    }
    let mut acc: std::collections::BTreeMap<Expr, Rat> = Default::default();
    let mut constant = Rat::zero();
    for t in flat {
        let (c, core) = coeff_core(&t);
        if core.is_lit_one() {
            constant += c;
        } else {
            *acc.entry(core).or_insert_with(Rat::zero) += c;
        }
    }
    let mut out: Vec<Expr> = Vec::new();
    if !constant.is_zero() {
        out.push(Expr::num_rat(constant));
    }
    for (core, c) in acc {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            out.push(core);
        } else {
            // Prepend the coefficient preserving product ordering (Num sorts
            // first under the derived Node order).
            let mut fs = vec![Expr::num_rat(c)];
            match core.node() {
                Node::Prod(cs) => fs.extend(cs.iter().cloned()),
                _ => fs.push(core),
            }
            out.push(Expr::raw(Node::Prod(fs)));
        }
    }
    out.sort();
    match out.len() {
        0 => Expr::zero(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::raw(Node::Sum(out)),
    }
}

fn canon_mul(factors: Vec<Expr>) -> Expr {
    let mut work = factors;
    // Grouping can surface new mergeable factors (e.g. a power folding to a
    // number, exp arguments cancelling); loop until stable.
    for _ in 0..8 {
        let (out, stable) = mul_pass(std::mem::take(&mut work));
        if stable {
            return out;
        }
        work = out.factors();
    }
    mul_pass(work).0
}

fn mul_pass(factors: Vec<Expr>) -> (Expr, bool) {
    let mut coeff = Rat::one();
    let mut bases: std::collections::BTreeMap<Expr, Rat> = Default::default();
    let mut exp_terms: Vec<Expr> = Vec::new();
    let mut stack = factors;
    while let Some(f) = stack.pop() {
        match f.node() {
            Node::Num(n) => coeff *= n.clone(),
            Node::Prod(cs) => stack.extend(cs.iter().cloned()),
            Node::Fn(UnaryFn::Exp, a) => exp_terms.push(a.clone()),
            Node::Pow(b, e) => *bases.entry(b.clone()).or_insert_with(Rat::zero) += e.clone(),
            _ => *bases.entry(f.clone()).or_insert_with(Rat::zero) += Rat::one(),
        }
    }
    if coeff.is_zero() {
        return (Expr::zero(), true);
    }
    let mut out: Vec<Expr> = Vec::new();
    let mut stable = true;
    for (b, e) in bases {
        if e.is_zero() {
            continue;
        }
        let p = canon_pow(b, e);
        match p.node() {
            Node::Num(n) => {
                coeff *= n.clone();
                stable = false;
            }
            Node::Prod(_) | Node::Fn(UnaryFn::Exp, _) => {
                out.push(p);
                stable = false;
            }
            _ => out.push(p),
        }
    }
    if !exp_terms.is_empty() {
        let arg = canon_add(exp_terms);
        let e = canon_fn(UnaryFn::Exp, arg);
        if !e.is_lit_one() {
            match e.node() {
                Node::Fn(UnaryFn::Exp, _) => out.push(e),
                _ => {
                    out.push(e);
                    stable = false;
                }
            }
        }
    }
    // c * (a + b) distributes when the sum is the only symbolic factor, so
    // rational rescaling never hides a sum's summand structure
    if out.len() == 1 && !coeff.is_one() {
        if let Node::Sum(ts) = out[0].node() {
            let c = Expr::num_rat(coeff);
            let sum = canon_add(
                ts.iter()
                    .map(|t| canon_mul(vec![c.clone(), t.clone()]))
                    .collect(),
            );
            return (sum, true);
        }
    }
    if !coeff.is_one() {
        out.push(Expr::num_rat(coeff));
    }
    out.sort();
    let expr = match out.len() {
        0 => Expr::one(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::raw(Node::Prod(out)),
    };
    (expr, stable)
}

fn canon_pow(base: Expr, e: Rat) -> Expr {
    if e.is_zero() {
        return Expr::one();
    }
    if e.is_one() {
        return base;
    }
    match base.node() {
        Node::Num(n) => {
            if let Some(v) = rat_pow_rat(n, &e) {
                return Expr::num_rat(v);
            }
            Expr::raw(Node::Pow(base, e))
        }
        // (b^a)^e = b^(a*e) is taken only for integer e: even inner powers
        // under fractional outer ones change value ((x^2)^(1/2) = |x|).
        Node::Pow(b2, e2) if e.is_integer() => canon_pow(b2.clone(), e2.clone() * e),
        Node::Fn(UnaryFn::Exp, a) => {
            canon_fn(UnaryFn::Exp, canon_mul(vec![Expr::num_rat(e), a.clone()]))
        }
        Node::Prod(cs) if e.is_integer() => {
            canon_mul(cs.iter().map(|c| canon_pow(c.clone(), e.clone())).collect())
        }
        _ => Expr::raw(Node::Pow(base, e)),
    }
}

fn canon_fn(f: UnaryFn, arg: Expr) -> Expr {
    match f {
        UnaryFn::Sin => {
            if arg.is_lit_zero() {
                return Expr::zero();
            }
            if let Some(pos) = strip_negation(&arg) {
                return Expr::neg(canon_fn(UnaryFn::Sin, pos));
            }
            if let Some(half) = half_even_arg(&arg) {
                // sin(2y) = 2 sin y cos y, applied while the rational
                // coefficient has an even numerator.
                return canon_mul(vec![
                    Expr::num_i(2),
                    canon_fn(UnaryFn::Sin, half.clone()),
                    canon_fn(UnaryFn::Cos, half),
                ]);
            }
            Expr::raw(Node::Fn(f, arg))
        }
        UnaryFn::Cos => {
            if arg.is_lit_zero() {
                return Expr::one();
            }
            if let Some(pos) = strip_negation(&arg) {
                return canon_fn(UnaryFn::Cos, pos);
            }
            if let Some(half) = half_even_arg(&arg) {
                // cos(2y) = 1 - 2 sin^2 y
                let s = canon_fn(UnaryFn::Sin, half);
                return canon_add(vec![
                    Expr::one(),
                    canon_mul(vec![Expr::num_i(-2), canon_pow(s, rat_i(2))]),
                ]);
            }
            Expr::raw(Node::Fn(f, arg))
        }
        UnaryFn::Exp => {
            if arg.is_lit_zero() {
                return Expr::one();
            }
            if let Node::Fn(UnaryFn::Log, inner) = arg.node() {
                return inner.clone();
            }
            Expr::raw(Node::Fn(f, arg))
        }
        UnaryFn::Log => {
            if arg.is_lit_one() {
                return Expr::zero();
            }
            if let Node::Fn(UnaryFn::Exp, inner) = arg.node() {
                return inner.clone();
            }
            Expr::raw(Node::Fn(f, arg))
        }
        UnaryFn::Abs => {
            if let Node::Num(n) = arg.node() {
                return Expr::num_rat(n.abs());
            }
            if let Some(pos) = strip_negation(&arg) {
                return canon_fn(UnaryFn::Abs, pos);
            }
            match arg.node() {
                Node::Fn(UnaryFn::Abs, _) | Node::Fn(UnaryFn::Exp, _) => return arg,
                Node::Pow(_, e)
                    if e.is_integer() && (e.numer() % BigInt::from(2)).is_zero() =>
                {
                    return arg
                }
                _ => {}
            }
            Expr::raw(Node::Fn(f, arg))
        }
    }
}

/// `Some(-e)` when the term's rational coefficient is negative.
fn strip_negation(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Num(n) if n.is_negative() => Some(Expr::num_rat(-n.clone())),
        Node::Prod(fs) => {
            if let Node::Num(n) = fs[0].node() {
                if n.is_negative() {
                    let mut out = vec![Expr::num_rat(-n.clone())];
                    out.extend(fs[1..].iter().cloned());
                    return Some(canon_mul(out));
                }
            }
            None
        }
        _ => None,
    }
}

/// For a monomial argument `c * m` with even-numerator rational `c`,
/// returns `c/2 * m`.
fn half_even_arg(e: &Expr) -> Option<Expr> {
    let (c, core) = coeff_core(e);
    if core.is_lit_one() || matches!(core.node(), Node::Sum(_)) {
        return None;
    }
    if (c.numer() % BigInt::from(2)).is_zero() {
        Some(canon_mul(vec![Expr::num_rat(c / rat_i(2)), core]))
    } else {
        None
    }
}

fn rat_pow_rat(n: &Rat, e: &Rat) -> Option<Rat> {
    if e.is_integer() {
        let i = e.to_integer().to_i64()?;
        if i.unsigned_abs() > 256 {
            return None;
        }
        if n.is_zero() {
            return if i > 0 { Some(Rat::zero()) } else { None };
        }
        let p = n.numer().pow(i.unsigned_abs() as u32);
        let q = n.denom().pow(i.unsigned_abs() as u32);
        return Some(if i >= 0 { Rat::new(p, q) } else { Rat::new(q, p) });
    }
    // fractional exponent: fold only exact roots
    let q = e.denom().to_u32()?;
    if n.is_negative() && q % 2 == 0 {
        return None;
    }
    if n.is_zero() {
        return if e.is_positive() { Some(Rat::zero()) } else { None };
    }
    let rn = exact_root(&n.numer().abs(), q)?;
    let rd = exact_root(&n.denom().abs(), q)?;
    let mut root = Rat::new(rn, rd);
    if n.is_negative() {
        root = -root;
    }
    let p = Rat::from_integer(e.numer().clone());
    rat_pow_rat(&root, &p)
}

fn exact_root(b: &BigInt, q: u32) -> Option<BigInt> {
    let r = b.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) == *b {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    #[test]
    fn flatten_and_sort() {
        let a = Expr::add2(s("y"), Expr::add2(s("x"), Expr::num_i(3)));
        let b = Expr::add(vec![Expr::num_i(3), s("x"), s("y")]);
        assert_eq!(a, b);
    }

    #[test]
    fn like_terms_merge() {
        let e = Expr::add(vec![s("x"), s("x"), Expr::mul2(Expr::num_i(-2), s("x"))]);
        assert!(e.is_lit_zero());
    }

    #[test]
    fn power_collection() {
        let e = Expr::mul(vec![s("x"), s("x"), Expr::powi(s("x"), -2)]);
        assert!(e.is_lit_one());
        let f = Expr::mul2(Expr::powi(s("r"), 4), Expr::powi(s("r"), -2));
        assert_eq!(f, Expr::powi(s("r"), 2));
    }

    #[test]
    fn x_times_x_pow_zero() {
        let e = Expr::mul2(s("x"), Expr::powi(s("x"), 0));
        assert_eq!(e, s("x"));
    }

    #[test]
    fn exp_merging() {
        let e = Expr::mul2(Expr::exp(s("a")), Expr::exp(s("b")));
        assert_eq!(e, Expr::exp(Expr::add2(s("a"), s("b"))));
        let f = Expr::mul2(Expr::exp(s("a")), Expr::exp(Expr::neg(s("a"))));
        assert!(f.is_lit_one());
        let g = Expr::powi(Expr::exp(s("a")), 2);
        assert_eq!(g, Expr::exp(Expr::mul2(Expr::num_i(2), s("a"))));
    }

    #[test]
    fn tan_cot_cancel() {
        let e = Expr::mul2(Expr::tan(s("x")), Expr::cot(s("x")));
        assert!(e.is_lit_one());
    }

    #[test]
    fn even_fractional_power_does_not_collapse() {
        // (x^2)^(1/2) is |x|, not x; the merge must not fire.
        let e = Expr::sqrt(Expr::powi(s("x"), 2));
        assert!(matches!(e.node(), Node::Pow(b, _) if matches!(b.node(), Node::Pow(_, _))));
        // while (x^(1/2))^2 = x does merge
        let f = Expr::powi(Expr::sqrt(s("x")), 2);
        assert_eq!(f, s("x"));
    }

    #[test]
    fn double_angle_normalization() {
        let direct = Expr::sin(Expr::mul2(Expr::num_i(2), s("th")));
        let expanded = Expr::mul(vec![
            Expr::num_i(2),
            Expr::sin(s("th")),
            Expr::cos(s("th")),
        ]);
        assert_eq!(direct, expanded);
        let c = Expr::cos(Expr::mul2(Expr::num_i(2), s("th")));
        let cexp = Expr::add2(
            Expr::one(),
            Expr::mul2(Expr::num_i(-2), Expr::powi(Expr::sin(s("th")), 2)),
        );
        assert_eq!(c, cexp);
    }

    #[test]
    fn parity_extraction() {
        assert_eq!(Expr::sin(Expr::neg(s("x"))), Expr::neg(Expr::sin(s("x"))));
        assert_eq!(Expr::cos(Expr::neg(s("x"))), Expr::cos(s("x")));
        assert_eq!(Expr::abs(Expr::neg(s("x"))), Expr::abs(s("x")));
    }

    #[test]
    fn exact_rational_powers() {
        assert_eq!(Expr::powi(Expr::frac(2, 3), 2), Expr::frac(4, 9));
        assert_eq!(Expr::sqrt(Expr::num_i(4)), Expr::num_i(2));
        assert_eq!(Expr::pow(Expr::num_i(8), rat(2, 3)), Expr::num_i(4));
        assert_eq!(Expr::pow(Expr::num_i(-8), rat(1, 3)), Expr::num_i(-2));
        // 2^(1/2) stays symbolic
        assert!(matches!(Expr::sqrt(Expr::num_i(2)).node(), Node::Pow(_, _)));
    }

    #[test]
    fn log_exp_inverse() {
        assert_eq!(Expr::log(Expr::exp(s("x"))), s("x"));
        assert_eq!(Expr::exp(Expr::log(s("x"))), s("x"));
    }

    #[test]
    fn zero_annihilates_product() {
        let e = Expr::mul(vec![Expr::zero(), Expr::powi(s("x"), -1)]);
        assert!(e.is_lit_zero());
    }

    #[test]
    fn canonicalize_fixpoint_on_constructed() {
        let e = Expr::add2(
            Expr::mul(vec![Expr::frac(1, 3), Expr::powi(s("r"), 3), Expr::sin(s("th"))]),
            Expr::tan(s("x")),
        );
        assert_eq!(e.canonicalize(), e);
    }
}
