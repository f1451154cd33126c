//! Deterministic sampling boxes for probabilistic identity checking.
//!
//! Every numeric check in the crate draws points from a seeded generator, so
//! two runs with the same inputs produce byte-identical output.

use crate::error::{Error, Result};
use crate::expr::{eval, Bindings, Expr};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_SEED: u64 = 424242;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 100;

/// Points on a declared singular locus are rejected when any locus
/// expression evaluates this close to zero.
const SINGULAR_MARGIN: f64 = 1e-3;
pub const MAX_REDRAWS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    /// Uniform over `[lo, hi]`.
    Interval(f64, f64),
    /// Uniform over `[-hi, -lo] ∪ [lo, hi]`; keeps a sign-indefinite
    /// parameter like the volume multiplier away from zero.
    TwoSided(f64, f64),
}

impl Range {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Range::Interval(lo, hi) => rng.gen_range(lo..hi),
            Range::TwoSided(lo, hi) => {
                let mag = rng.gen_range(lo..hi);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleConfig {
    pub n: usize,
    pub tol: f64,
    pub seed: u64,
    /// Per-symbol sampling boxes; symbols not listed fall back to built-in
    /// defaults keyed on their role (see [`SampleConfig::range_for`]).
    pub boxes: BTreeMap<String, Range>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            n: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            boxes: BTreeMap::new(),
        }
    }
}

impl SampleConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_box(mut self, sym: &str, range: Range) -> Self {
        self.boxes.insert(sym.to_string(), range);
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Box for one symbol. Explicit entries win; otherwise the volume
    /// multiplier `lambda` is two-sided in `[0.1, 1]`, jet symbols (those
    /// containing `_`) span `[-1, 1]`, and anything else spans `[0.5, 3]`.
    pub fn range_for(&self, sym: &str) -> Range {
        if let Some(r) = self.boxes.get(sym) {
            return *r;
        }
        if sym == "lambda" {
            return Range::TwoSided(0.1, 1.0);
        }
        if sym.contains('_') {
            return Range::Interval(-1.0, 1.0);
        }
        Range::Interval(0.5, 3.0)
    }

    pub fn sample_point(&self, syms: &BTreeSet<String>, rng: &mut ChaCha8Rng) -> Bindings {
        syms.iter()
            .map(|s| (s.clone(), self.range_for(s).draw(rng)))
            .collect()
    }

    /// Draw a point rejecting the singular locus: a draw is discarded when
    /// any locus expression is smaller than a fixed margin in magnitude (or
    /// fails to evaluate). Gives up after a bounded number of redraws.
    pub fn sample_avoiding(
        &self,
        syms: &BTreeSet<String>,
        singular: &[Expr],
        rng: &mut ChaCha8Rng,
    ) -> Result<Bindings> {
        for _ in 0..MAX_REDRAWS {
            let point = self.sample_point(syms, rng);
            let clear = singular.iter().all(|s| match eval(s, &point) {
                Ok(v) => v.abs() > SINGULAR_MARGIN,
                Err(_) => false,
            });
            if clear {
                return Ok(point);
            }
        }
        Err(Error::DomainError(format!(
            "no sample point clear of the singular locus after {MAX_REDRAWS} draws"
        )))
    }

    /// `n` locus-clear points from a fresh seeded generator.
    pub fn sample_points(
        &self,
        syms: &BTreeSet<String>,
        singular: &[Expr],
    ) -> Result<Vec<Bindings>> {
        let mut rng = self.rng();
        (0..self.n)
            .map(|_| self.sample_avoiding(syms, singular, &mut rng))
            .collect()
    }
}
