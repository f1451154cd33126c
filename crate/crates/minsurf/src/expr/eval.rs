//! Floating-point evaluation under a variable binding.

use super::{opaque_key, Expr, Node, UnaryFn};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Values for symbols and opaque applications. Opaque nodes bind through
/// their derivative-order key: `nu(R)` looks up `"nu"`, `nu''(R)` looks up
/// `"nu''"`. The argument is bound separately and only drives
/// differentiation, so an opaque family samples as independent values.
pub type Bindings = BTreeMap<String, f64>;

pub fn eval(e: &Expr, b: &Bindings) -> Result<f64> {
    let v = eval_inner(e, b)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DomainError(format!("non-finite value {v}")))
    }
}

fn eval_inner(e: &Expr, b: &Bindings) -> Result<f64> {
    match e.node() {
        Node::Num(n) => n
            .to_f64()
            .ok_or_else(|| Error::DomainError("rational out of f64 range".into())),
        Node::Sym(s) => b
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnboundSymbol(s.clone())),
        Node::Pow(base, exp) => {
            let bv = eval_inner(base, b)?;
            pow_rat(bv, exp)
        }
        Node::Fn(f, a) => {
            let av = eval_inner(a, b)?;
            Ok(match f {
                UnaryFn::Sin => av.sin(),
                UnaryFn::Cos => av.cos(),
                UnaryFn::Exp => av.exp(),
                UnaryFn::Log => {
                    if av <= 0.0 {
                        return Err(Error::DomainError(format!("log of {av}")));
                    }
                    av.ln()
                }
                UnaryFn::Abs => av.abs(),
            })
        }
        Node::Opaque { name, order, arg } => {
            // the argument must still be well-formed under the binding
            eval_inner(arg, b)?;
            let key = opaque_key(name, *order);
            b.get(&key)
                .copied()
                .ok_or(Error::UnboundSymbol(key))
        }
        Node::Prod(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_inner(f, b)?;
            }
            Ok(acc)
        }
        Node::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_inner(t, b)?;
            }
            Ok(acc)
        }
    }
}

fn pow_rat(base: f64, exp: &super::Rat) -> Result<f64> {
    let ef = exp
        .to_f64()
        .ok_or_else(|| Error::DomainError("exponent out of f64 range".into()))?;
    if base == 0.0 {
        if ef > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::DomainError("zero raised to a non-positive power".into()));
    }
    if base > 0.0 {
        return Ok(base.powf(ef));
    }
    // negative base: integer exponents and odd-denominator rationals are
    // real-valued (signed root), even denominators are not
    if exp.is_integer() {
        let odd = !(exp.to_integer() % BigInt::from(2)).is_zero();
        let mag = (-base).powf(ef);
        return Ok(if odd { -mag } else { mag });
    }
    if (exp.denom() % BigInt::from(2)).is_zero() {
        return Err(Error::DomainError(format!(
            "negative base {base} under even-root exponent {exp}"
        )));
    }
    let mag = (-base).powf(ef);
    let num_odd = !(exp.numer().abs() % BigInt::from(2)).is_zero();
    Ok(if num_odd { -mag } else { mag })
}
