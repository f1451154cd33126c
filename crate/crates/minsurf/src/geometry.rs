//! Split metrics `ds^2 = du^2 + h_ij(u, x) dx^i dx^j` and the geometric
//! operators the symmetry analysis needs: determinant, inverse, Christoffel
//! symbols of the `x`-slice, Lie derivatives, and the Killing check for
//! vector fields on the full manifold.

use crate::error::{Error, Result};
use crate::expr::{diff_with, is_zero, DiffRules, Expr, ZeroVerdict};
use crate::sample::{Range, SampleConfig};
use std::collections::BTreeMap;

/// Sign convention for `|h|`: the slice determinant itself for Riemannian
/// `h`, its negation when `h` carries one timelike direction, so that `|h|`
/// is positive on the sampling box either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

/// Vector field on the full manifold, `X = eta d/du + xi^i d/dx^i`.
/// Components may depend on `u` and `x`.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub name: String,
    pub eta: Expr,
    pub xi: Vec<Expr>,
}

impl VectorField {
    pub fn new(name: &str, eta: Expr, xi: Vec<Expr>) -> Self {
        VectorField { name: name.to_string(), eta, xi }
    }
}

#[derive(Debug, Clone)]
pub struct SplitMetric {
    pub name: String,
    /// Name of the distinguished coordinate `u`.
    pub u: String,
    /// Names of the slice coordinates `x^i`.
    pub coords: Vec<String>,
    /// Symmetric slice metric `h_ij(u, x)`.
    pub h: Vec<Vec<Expr>>,
    pub signature: Signature,
    /// Expressions whose zero set is excluded from sampling (coordinate
    /// degeneracies such as `sin(theta)`).
    pub singular: Vec<Expr>,
    /// Derivative closure rules for opaque functions appearing in `h`.
    pub rules: DiffRules,
    /// Sampling boxes for coordinates and opaque values.
    pub boxes: BTreeMap<String, Range>,
}

/// Lie derivative of the full metric along a field, in split blocks.
#[derive(Debug, Clone)]
pub struct LieBlocks {
    /// `(L_X g)_uu = 2 eta_,u`
    pub uu: Expr,
    /// `(L_X g)_uj = h_ij xi^i_,u + eta_,j`
    pub ux: Vec<Expr>,
    /// `(L_X g)_ij = eta h_ij,u + xi^k h_ij,k + h_kj xi^k_,i + h_ik xi^k_,j`
    pub xx: Vec<Vec<Expr>>,
}

#[derive(Debug, Clone)]
pub struct KillingReport {
    pub field: String,
    /// Per-component verdicts keyed `"(a,b)"` over the upper triangle of the
    /// full metric, `u` block included.
    pub components: BTreeMap<String, ZeroVerdict>,
    /// Largest scale-normalized residual seen across components and samples.
    pub max_residual: f64,
    pub is_killing: bool,
}

impl SplitMetric {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// Differentiation with this metric's opaque closure rules applied.
    pub fn diff(&self, e: &Expr, var: &str) -> Expr {
        diff_with(e, var, &self.rules)
    }

    /// Sampling configuration for checks on this metric: the base keeps its
    /// sample count, tolerance, and seed; metric boxes fill in symbols the
    /// base does not pin.
    pub fn sampling(&self, base: &SampleConfig) -> SampleConfig {
        let mut cfg = base.clone();
        for (k, v) in &self.boxes {
            cfg.boxes.entry(k.clone()).or_insert(*v);
        }
        cfg
    }

    pub fn det(&self) -> Expr {
        det_of(&self.h)
    }

    /// `|h|`, positive on the sampling box under the declared signature.
    pub fn det_abs(&self) -> Expr {
        match self.signature {
            Signature::Riemannian => self.det(),
            Signature::Lorentzian => Expr::neg(self.det()),
        }
    }

    pub fn sqrt_det_abs(&self) -> Expr {
        Expr::sqrt(self.det_abs())
    }

    /// Degeneracy check: `|h|` must be robustly nonzero on the box.
    pub fn check_nondegenerate(&self, base: &SampleConfig) -> Result<()> {
        let cfg = self.sampling(base);
        match is_zero(&self.det_abs(), &cfg, &self.singular)? {
            ZeroVerdict::NonZero(_) => Ok(()),
            v => Err(Error::DegenerateMetric(format!(
                "slice determinant of `{}` is not robustly nonzero on the sampling box ({v:?})",
                self.name
            ))),
        }
    }

    /// Inverse slice metric by adjugate over determinant.
    pub fn inverse(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        let det = self.det();
        let mut inv = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                let cof = Expr::mul2(Expr::num_i(sign), det_of(&minor(&self.h, j, i)));
                inv[i][j] = Expr::div(cof, det.clone());
            }
        }
        inv
    }

    /// Christoffel symbols of the slice metric at fixed `u`, `G[k][i][j]`.
    pub fn christoffel(&self) -> Vec<Vec<Vec<Expr>>> {
        let n = self.dim();
        let inv = self.inverse();
        let mut g = vec![vec![vec![Expr::zero(); n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..=i {
                    let mut terms = Vec::new();
                    for l in 0..n {
                        let s = Expr::add(vec![
                            self.diff(&self.h[l][i], &self.coords[j]),
                            self.diff(&self.h[l][j], &self.coords[i]),
                            Expr::neg(self.diff(&self.h[i][j], &self.coords[l])),
                        ]);
                        terms.push(Expr::mul2(inv[k][l].clone(), s));
                    }
                    let gamma = Expr::mul2(Expr::frac(1, 2), Expr::add(terms));
                    g[k][i][j] = gamma.clone();
                    g[k][j][i] = gamma;
                }
            }
        }
        g
    }

    /// `x`-slice Lie derivative `(L_xi h)_ij` at fixed `u` (no `eta` terms).
    pub fn lie_h_slice(&self, xi: &[Expr]) -> Vec<Vec<Expr>> {
        let n = self.dim();
        assert_eq!(xi.len(), n);
        let mut out = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut terms = Vec::new();
                for k in 0..n {
                    terms.push(Expr::mul2(
                        xi[k].clone(),
                        self.diff(&self.h[i][j], &self.coords[k]),
                    ));
                    terms.push(Expr::mul2(
                        self.h[k][j].clone(),
                        self.diff(&xi[k], &self.coords[i]),
                    ));
                    terms.push(Expr::mul2(
                        self.h[i][k].clone(),
                        self.diff(&xi[k], &self.coords[j]),
                    ));
                }
                let e = Expr::add(terms);
                out[i][j] = e.clone();
                out[j][i] = e;
            }
        }
        out
    }

    /// Lie derivative of the full metric along `field`, in split blocks.
    pub fn lie_full(&self, field: &VectorField) -> LieBlocks {
        let n = self.dim();
        assert_eq!(field.xi.len(), n);
        let uu = Expr::mul2(Expr::num_i(2), self.diff(&field.eta, &self.u));
        let mut ux = Vec::with_capacity(n);
        for j in 0..n {
            let mut terms = vec![self.diff(&field.eta, &self.coords[j])];
            for i in 0..n {
                terms.push(Expr::mul2(
                    self.h[i][j].clone(),
                    self.diff(&field.xi[i], &self.u),
                ));
            }
            ux.push(Expr::add(terms));
        }
        let mut xx = self.lie_h_slice(&field.xi);
        for i in 0..n {
            for j in 0..n {
                xx[i][j] = Expr::add2(
                    xx[i][j].clone(),
                    Expr::mul2(field.eta.clone(), self.diff(&self.h[i][j], &self.u)),
                );
            }
        }
        LieBlocks { uu, ux, xx }
    }

    /// Symmetrized covariant gradient with raised indices,
    /// `xi^(i;j) = h^ik h^jl (L_xi h)_kl / 2`.
    pub fn sym_grad_raised(&self, xi: &[Expr]) -> Vec<Vec<Expr>> {
        let n = self.dim();
        let inv = self.inverse();
        let lie = self.lie_h_slice(xi);
        let mut out = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut terms = Vec::new();
                for k in 0..n {
                    for l in 0..n {
                        terms.push(Expr::mul(vec![
                            Expr::frac(1, 2),
                            inv[i][k].clone(),
                            inv[j][l].clone(),
                            lie[k][l].clone(),
                        ]));
                    }
                }
                let e = Expr::add(terms);
                out[i][j] = e.clone();
                out[j][i] = e;
            }
        }
        out
    }

    /// Covariant divergence on the slice,
    /// `xi^k_;k = (sqrt|h| xi^k)_,k / sqrt|h|`.
    pub fn divergence(&self, xi: &[Expr]) -> Expr {
        let root = self.sqrt_det_abs();
        let mut terms = Vec::new();
        for (k, c) in self.coords.iter().enumerate() {
            terms.push(self.diff(&Expr::mul2(root.clone(), xi[k].clone()), c));
        }
        Expr::div(Expr::add(terms), root)
    }

    /// Killing check on the full manifold: every Lie-derivative component
    /// must vanish on the box. `Inconclusive` components block the verdict.
    pub fn is_killing(&self, field: &VectorField, base: &SampleConfig) -> Result<KillingReport> {
        let cfg = self.sampling(base);
        let blocks = self.lie_full(field);
        let mut components = BTreeMap::new();
        let mut max_residual = 0.0f64;
        let mut record = |label: String, e: &Expr| -> Result<()> {
            let v = is_zero(e, &cfg, &self.singular)?;
            let r = crate::expr::residual_norm(e, &cfg, &self.singular)?;
            max_residual = max_residual.max(r);
            components.insert(label, v);
            Ok(())
        };
        record(format!("({},{})", self.u, self.u), &blocks.uu)?;
        for (j, cj) in self.coords.iter().enumerate() {
            record(format!("({},{})", self.u, cj), &blocks.ux[j])?;
        }
        for (i, ci) in self.coords.iter().enumerate() {
            for (j, cj) in self.coords.iter().enumerate() {
                if i <= j {
                    record(format!("({ci},{cj})"), &blocks.xx[i][j])?;
                }
            }
        }
        let is_killing = components.values().all(|v| v.is_zero());
        Ok(KillingReport {
            field: field.name.clone(),
            components,
            max_residual,
            is_killing,
        })
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    let n = m.len();
    let mut out = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == row {
            continue;
        }
        let mut r = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == col {
                continue;
            }
            r.push(m[i][j].clone());
        }
        out.push(r);
    }
    out
}

fn det_of(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut terms = Vec::with_capacity(n);
    for j in 0..n {
        if m[0][j].is_lit_zero() {
            continue;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        terms.push(Expr::mul(vec![
            Expr::num_i(sign),
            m[0][j].clone(),
            det_of(&minor(m, 0, j)),
        ]));
    }
    Expr::add(terms)
}
