//! Infix expression parser.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := INT | '(' '-'? INT ('/' INT)? ')'
//! atom     := INT | IDENT '''* '(' expr ')' | IDENT | '(' expr ')'
//! ```
//!
//! Exponents are rational constants; negative or fractional ones must be
//! parenthesized (`x^(-2)`, `x^(1/2)`). `sin cos tan cot exp log sqrt abs`
//! are builtin calls (`tan`, `cot`, `sqrt` desugar on construction); any
//! other applied identifier is an opaque function, with `'` marking
//! derivative order as in `nu''(R)`. Numeric literals are integers; decimal
//! constants are handled out-of-band by [`rat_from_decimal`].

use super::{Expr, Rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::One;

pub fn parse(input: &str) -> Result<Expr> {
    let tokens = lex(input)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(p.err_at(t.line, t.col, format!("unexpected `{}`", t.kind))),
    }
}

/// Exact rational from a decimal or fraction literal: `"0.25"`, `"-3"`,
/// `"2/3"`. Used for command-line constants, which are not expressions.
pub fn rat_from_decimal(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::ValidationError(format!("`{t}` is not a rational constant"));
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let r = if let Some((num, den)) = body.split_once('/') {
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        Rat::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part: BigInt = if int.is_empty() {
            BigInt::from(0)
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        Rat::from_integer(int_part) + Rat::new(frac_num, den)
    } else {
        Rat::from_integer(body.parse().map_err(|_| bad())?)
    };
    Ok(if neg { -r } else { r })
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Prime(u32),
}

impl std::fmt::Display for TokKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TokKind::Int(n) => write!(f, "{n}"),
            TokKind::Ident(s) => write!(f, "{s}"),
            TokKind::Plus => write!(f, "+"),
            TokKind::Minus => write!(f, "-"),
            TokKind::Star => write!(f, "*"),
            TokKind::Slash => write!(f, "/"),
            TokKind::Caret => write!(f, "^"),
            TokKind::LParen => write!(f, "("),
            TokKind::RParen => write!(f, ")"),
            TokKind::Prime(n) => {
                for _ in 0..*n {
                    write!(f, "'")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn lex(input: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = input.chars().collect();
    let mut pos = Vec::with_capacity(chars.len());
    let (mut line, mut col) = (1usize, 1usize);
    for &c in &chars {
        pos.push((line, col));
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = pos[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let kind = match c {
            '+' => {
                i += 1;
                TokKind::Plus
            }
            '-' => {
                i += 1;
                TokKind::Minus
            }
            '*' => {
                i += 1;
                TokKind::Star
            }
            '/' => {
                i += 1;
                TokKind::Slash
            }
            '^' => {
                i += 1;
                TokKind::Caret
            }
            '(' => {
                i += 1;
                TokKind::LParen
            }
            ')' => {
                i += 1;
                TokKind::RParen
            }
            '\'' => {
                let mut n = 0u32;
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                    n += 1;
                }
                TokKind::Prime(n)
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    return Err(Error::parse(
                        tl,
                        tc,
                        "decimal literals are not expressions; use a rational like 1/2",
                    ));
                }
                let s: String = chars[start..i].iter().collect();
                TokKind::Int(s.parse().expect("digits"))
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                TokKind::Ident(chars[start..i].iter().collect())
            }
            other => {
                return Err(Error::parse(tl, tc, format!("unexpected character `{other}`")))
            }
        };
        out.push(Tok { kind, line: tl, col: tc });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

const BUILTINS: [&str; 8] = ["sin", "cos", "tan", "cot", "exp", "log", "sqrt", "abs"];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, line: usize, col: usize, msg: impl Into<String>) -> Error {
        Error::parse(line, col, msg)
    }

    fn err_eof(&self, msg: &str) -> Error {
        match self.tokens.last() {
            Some(t) => Error::parse(t.line, t.col + 1, format!("{msg}, found end of input")),
            None => Error::parse(1, 1, format!("{msg}, found empty input")),
        }
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Tok> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(t),
            Some(t) => Err(self.err_at(t.line, t.col, format!("expected {what}, found `{}`", t.kind))),
            None => Err(self.err_eof(&format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokKind::Plus) => {
                    self.next();
                    terms.push(self.term()?);
                }
                Some(TokKind::Minus) => {
                    self.next();
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokKind::Star) => {
                    self.next();
                    acc = Expr::mul2(acc, self.unary()?);
                }
                Some(TokKind::Slash) => {
                    self.next();
                    acc = Expr::div(acc, self.unary()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Minus)) {
            self.next();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Caret)) {
            self.next();
            let e = self.exponent()?;
            return Ok(Expr::pow(base, e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rat> {
        match self.next() {
            Some(Tok { kind: TokKind::Int(n), .. }) => Ok(Rat::from_integer(n)),
            Some(Tok { kind: TokKind::LParen, .. }) => {
                let neg = if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Minus)) {
                    self.next();
                    true
                } else {
                    false
                };
                let num = match self.next() {
                    Some(Tok { kind: TokKind::Int(n), .. }) => n,
                    Some(t) => {
                        return Err(self.err_at(
                            t.line,
                            t.col,
                            "exponent must be a rational constant",
                        ))
                    }
                    None => return Err(self.err_eof("expected exponent numerator")),
                };
                let den = if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Slash)) {
                    self.next();
                    match self.next() {
                        Some(Tok { kind: TokKind::Int(n), .. }) => n,
                        Some(t) => {
                            return Err(self.err_at(t.line, t.col, "expected exponent denominator"))
                        }
                        None => return Err(self.err_eof("expected exponent denominator")),
                    }
                } else {
                    BigInt::one()
                };
                self.expect(TokKind::RParen, "`)` after exponent")?;
                let r = Rat::new(num, den);
                Ok(if neg { -r } else { r })
            }
            Some(t) => Err(self.err_at(
                t.line,
                t.col,
                format!(
                    "exponent must be an integer or parenthesized rational, found `{}`",
                    t.kind
                ),
            )),
            None => Err(self.err_eof("expected exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok { kind: TokKind::Int(n), .. }) => Ok(Expr::num_rat(Rat::from_integer(n))),
            Some(Tok { kind: TokKind::LParen, .. }) => {
                let e = self.expr()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok { kind: TokKind::Ident(name), line, col }) => {
                let primes = if let Some(TokKind::Prime(n)) = self.peek().map(|t| t.kind.clone())
                {
                    self.next();
                    n
                } else {
                    0
                };
                let applied = matches!(self.peek().map(|t| &t.kind), Some(TokKind::LParen));
                if !applied {
                    if primes > 0 {
                        return Err(self.err_at(
                            line,
                            col,
                            format!("`{name}'` must be applied to an argument"),
                        ));
                    }
                    return Ok(Expr::sym(&name));
                }
                self.next(); // consume '('
                let arg = self.expr()?;
                self.expect(TokKind::RParen, "`)` after argument")?;
                if BUILTINS.contains(&name.as_str()) {
                    if primes > 0 {
                        return Err(self.err_at(
                            line,
                            col,
                            format!("`{name}` is a builtin and cannot take primes"),
                        ));
                    }
                    Ok(match name.as_str() {
                        "sin" => Expr::sin(arg),
                        "cos" => Expr::cos(arg),
                        "tan" => Expr::tan(arg),
                        "cot" => Expr::cot(arg),
                        "exp" => Expr::exp(arg),
                        "log" => Expr::log(arg),
                        "sqrt" => Expr::sqrt(arg),
                        "abs" => Expr::abs(arg),
                        _ => unreachable!(),
                    })
                } else {
                    Ok(Expr::opaque(&name, primes, arg))
                }
            }
            Some(t) => Err(self.err_at(
                t.line,
                t.col,
                format!("expected a value, found `{}`", t.kind),
            )),
            None => Err(self.err_eof("expected a value")),
        }
    }
}
