//! Infix printing. The printed form uses only the surface grammar the parser
//! accepts, so `parse(e.to_string())` reproduces `e` exactly.

use super::{opaque_key, Expr, Node, Rat};
use num_traits::Signed;
use std::fmt;

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Add = 0,
    Mul = 1,
    Pow = 2,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, Prec::Add)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: Prec) -> fmt::Result {
    match e.node() {
        Node::Num(n) => write_num(f, n, ctx),
        Node::Sym(s) => write!(f, "{s}"),
        Node::Pow(b, n) => {
            let parens = ctx > Prec::Pow;
            if parens {
                write!(f, "(")?;
            }
            write_pow_base(f, b)?;
            write!(f, "^")?;
            write_exponent(f, n)?;
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Node::Fn(func, a) => write!(f, "{}({})", func.name(), a),
        Node::Opaque { name, order, arg } => {
            write!(f, "{}({})", opaque_key(name, *order), arg)
        }
        Node::Prod(fs) => {
            let parens = ctx > Prec::Mul;
            if parens {
                write!(f, "(")?;
            }
            write_product(f, fs)?;
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Node::Sum(ts) => {
            let parens = ctx > Prec::Add;
            if parens {
                write!(f, "(")?;
            }
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    write_expr(f, t, Prec::Add)?;
                } else if let Some(pos) = super::strip_negation(t) {
                    write!(f, " - ")?;
                    write_expr(f, &pos, Prec::Mul)?;
                } else {
                    write!(f, " + ")?;
                    write_expr(f, t, Prec::Mul)?;
                }
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, fs: &[Expr]) -> fmt::Result {
    let mut rest = fs;
    // a leading rational coefficient prints bare; -1 prints as a sign
    if let Node::Num(n) = fs[0].node() {
        if *n == -Rat::from_integer(1.into()) {
            write!(f, "-")?;
        } else {
            write_num(f, n, Prec::Add)?;
            write!(f, "*")?;
        }
        rest = &fs[1..];
    }
    for (i, x) in rest.iter().enumerate() {
        if i > 0 {
            write!(f, "*")?;
        }
        write_expr(f, x, Prec::Mul)?;
    }
    Ok(())
}

fn write_num(f: &mut fmt::Formatter<'_>, n: &Rat, ctx: Prec) -> fmt::Result {
    let needs_parens = ctx > Prec::Add && (n.is_negative() || !n.is_integer());
    if needs_parens {
        write!(f, "(")?;
    }
    if n.is_integer() {
        write!(f, "{}", n.numer())?;
    } else {
        write!(f, "{}/{}", n.numer(), n.denom())?;
    }
    if needs_parens {
        write!(f, ")")?;
    }
    Ok(())
}

fn write_pow_base(f: &mut fmt::Formatter<'_>, b: &Expr) -> fmt::Result {
    match b.node() {
        Node::Sym(_) | Node::Fn(_, _) | Node::Opaque { .. } => write_expr(f, b, Prec::Add),
        Node::Num(n) if n.is_integer() && !n.is_negative() => write_num(f, n, Prec::Add),
        _ => {
            write!(f, "(")?;
            write_expr(f, b, Prec::Add)?;
            write!(f, ")")
        }
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, n: &Rat) -> fmt::Result {
    if n.is_integer() && !n.is_negative() {
        write!(f, "{}", n.numer())
    } else if n.is_integer() {
        write!(f, "({})", n.numer())
    } else {
        write!(f, "({}/{})", n.numer(), n.denom())
    }
}
