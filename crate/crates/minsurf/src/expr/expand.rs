//! Distribution of products over sums. Canonical construction deliberately
//! keeps `(a + b) * c` factored; normalization for up-to-a-factor equation
//! comparison needs the fully distributed form so that cleared denominators
//! cancel structurally.

use super::{Expr, Node, Rat};
use num_traits::{One, Signed, ToPrimitive};

/// Largest integer exponent `(sum)^n` is unrolled to; larger powers stay
/// factored to bound blowup.
const MAX_POW_UNROLL: i64 = 8;

/// Recursively distribute products (and small positive integer powers) over
/// sums. Non-integer powers and function arguments keep their structure.
pub fn expand(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Sum(ts) => Expr::add(ts.iter().map(expand).collect()),
        Node::Prod(fs) => distribute(fs.iter().map(expand).collect()),
        Node::Pow(b, r) => {
            let base = expand(b);
            if let Some(n) = unrollable(r, &base) {
                distribute(vec![base; n as usize])
            } else {
                Expr::pow(base, r.clone())
            }
        }
        Node::Fn(f, a) => Expr::fn_of(*f, expand(a)),
        Node::Opaque { name, order, arg } => Expr::opaque(name, *order, expand(arg)),
    }
}

fn unrollable(r: &Rat, base: &Expr) -> Option<i64> {
    if !matches!(base.node(), Node::Sum(_)) {
        return None;
    }
    if !r.is_integer() || !r.is_positive() || r.is_one() {
        return None;
    }
    let n = r.to_integer().to_i64()?;
    (n <= MAX_POW_UNROLL).then_some(n)
}

fn distribute(factors: Vec<Expr>) -> Expr {
    let mut terms: Vec<Vec<Expr>> = vec![Vec::new()];
    for f in factors {
        match f.node() {
            Node::Sum(ts) => {
                let mut next = Vec::with_capacity(terms.len() * ts.len());
                for row in &terms {
                    for t in ts {
                        let mut grown = row.clone();
                        grown.push(t.clone());
                        next.push(grown);
                    }
                }
                terms = next;
            }
            _ => {
                for row in &mut terms {
                    row.push(f.clone());
                }
            }
        }
    }
    if terms.len() == 1 {
        return Expr::mul(terms.pop().unwrap());
    }
    Expr::add(terms.into_iter().map(Expr::mul).collect())
}
