//! Probabilistic identity testing by seeded sampling.
//!
//! An expression is accepted as zero when it vanishes to tolerance at every
//! sample point, with the tolerance scaled by the magnitude of the largest
//! top-level summand so that cancellation between large terms is not
//! mistaken for genuine residue.

use super::{eval, Bindings, Expr};
use crate::error::Result;
use crate::sample::SampleConfig;

/// Margin separating "fails the zero test" from "robustly nonzero". Values
/// between the two bounds yield [`ZeroVerdict::Inconclusive`] rather than a
/// claim either way.
const ROBUST_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Bindings,
    pub value: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    Zero,
    NonZero(Witness),
    Inconclusive,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }
}

/// Sample `e` at locus-clear points; see module doc for the acceptance rule.
/// Evaluation failures (unbound symbols, domain errors surviving locus
/// rejection) propagate as errors, they are not verdicts.
pub fn is_zero(e: &Expr, cfg: &SampleConfig, singular: &[Expr]) -> Result<ZeroVerdict> {
    if e.is_lit_zero() {
        return Ok(ZeroVerdict::Zero);
    }
    if let Some(n) = e.as_num() {
        use num_traits::ToPrimitive;
        let v = n.to_f64().unwrap_or(f64::INFINITY);
        return Ok(ZeroVerdict::NonZero(Witness {
            point: Bindings::new(),
            value: v,
            scale: v.abs(),
        }));
    }
    let mut syms = e.free_symbols();
    for s in singular {
        syms.extend(s.free_symbols());
    }
    let summands = e.summands();
    let mut rng = cfg.rng();
    let mut all_pass = true;
    for _ in 0..cfg.n {
        let point = cfg.sample_avoiding(&syms, singular, &mut rng)?;
        let mut total = 0.0;
        let mut scale = 0.0f64;
        for t in &summands {
            let v = eval(t, &point)?;
            total += v;
            scale = scale.max(v.abs());
        }
        let pass = cfg.tol * (1.0 + scale);
        if total.abs() <= pass {
            continue;
        }
        if total.abs() >= ROBUST_FACTOR * pass {
            return Ok(ZeroVerdict::NonZero(Witness {
                point,
                value: total,
                scale,
            }));
        }
        all_pass = false;
    }
    Ok(if all_pass {
        ZeroVerdict::Zero
    } else {
        ZeroVerdict::Inconclusive
    })
}

/// Largest scale-normalized residual `|e| / (1 + scale)` over the sample
/// set; the quantity the zero test compares against `cfg.tol`.
pub fn residual_norm(e: &Expr, cfg: &SampleConfig, singular: &[Expr]) -> Result<f64> {
    if e.is_lit_zero() {
        return Ok(0.0);
    }
    let mut syms = e.free_symbols();
    for s in singular {
        syms.extend(s.free_symbols());
    }
    let summands = e.summands();
    let mut rng = cfg.rng();
    let mut worst = 0.0f64;
    for _ in 0..cfg.n {
        let point = cfg.sample_avoiding(&syms, singular, &mut rng)?;
        let mut total = 0.0;
        let mut scale = 0.0f64;
        for t in &summands {
            let v = eval(t, &point)?;
            total += v;
            scale = scale.max(v.abs());
        }
        worst = worst.max(total.abs() / (1.0 + scale));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    fn check(e: &Expr) -> ZeroVerdict {
        is_zero(e, &SampleConfig::default(), &[]).unwrap()
    }

    #[test]
    fn pythagorean_identity() {
        let e = Expr::add(vec![
            Expr::powi(Expr::sin(s("x")), 2),
            Expr::powi(Expr::cos(s("x")), 2),
            Expr::num_i(-1),
        ]);
        assert_eq!(check(&e), ZeroVerdict::Zero);
    }

    #[test]
    fn angle_addition() {
        let lhs = Expr::sin(Expr::add2(s("x"), s("y")));
        let rhs = Expr::add2(
            Expr::mul2(Expr::sin(s("x")), Expr::cos(s("y"))),
            Expr::mul2(Expr::cos(s("x")), Expr::sin(s("y"))),
        );
        assert_eq!(check(&Expr::sub(lhs, rhs)), ZeroVerdict::Zero);
    }

    #[test]
    fn distinct_symbols_nonzero() {
        match check(&Expr::sub(s("x"), s("y"))) {
            ZeroVerdict::NonZero(w) => {
                assert!((w.point["x"] - w.point["y"] - w.value).abs() < 1e-12);
            }
            v => panic!("expected NonZero, got {v:?}"),
        }
    }

    #[test]
    fn scale_relative_cancellation() {
        // 1e10 (sin^2 + cos^2 - 1): float residue ~1e-6 absolute, but tiny
        // against the summand scale
        let big = Expr::num_rat(crate::expr::rat_i(10_000_000_000));
        let e = Expr::mul2(
            big,
            Expr::add(vec![
                Expr::powi(Expr::sin(s("x")), 2),
                Expr::powi(Expr::cos(s("x")), 2),
                Expr::num_i(-1),
            ]),
        );
        assert_eq!(check(&e), ZeroVerdict::Zero);
    }

    #[test]
    fn gray_zone_is_inconclusive() {
        // 3e-7 * x on the default box: above tolerance, below the robust
        // threshold at every point
        let e = Expr::mul2(Expr::frac(3, 10_000_000), s("x"));
        assert_eq!(check(&e), ZeroVerdict::Inconclusive);
    }

    #[test]
    fn literal_constant_shortcuts() {
        assert_eq!(check(&Expr::zero()), ZeroVerdict::Zero);
        assert!(matches!(check(&Expr::frac(1, 2)), ZeroVerdict::NonZero(_)));
    }

    #[test]
    fn singular_locus_respected() {
        // x^-1 * x - 1 is zero away from x = 0; locus rejection keeps the
        // samples clear even on a box through the origin
        let e = Expr::sub(Expr::mul2(Expr::powi(s("x"), -1), s("x")), Expr::one());
        let cfg = SampleConfig::default()
            .with_box("x", crate::sample::Range::Interval(-1.0, 1.0));
        let v = is_zero(&e, &cfg, &[s("x")]).unwrap();
        assert_eq!(v, ZeroVerdict::Zero);
    }
}
