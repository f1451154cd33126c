//! Symbolic-numeric verification of variational point symmetries for the
//! constant-volume minimal-surface problem on split metrics
//! `ds^2 = du^2 + h_ij(u, x) dx^i dx^j`.
//!
//! The crate decides, for a given metric and candidate vector field, whether
//! the field generates a variational symmetry of the area-plus-volume
//! functional; constructs the boundary (gauge) vector when one exists in
//! closed elementary form; assembles the conserved current; and reduces the
//! field equation to an ODE along translation symmetries. Identities are
//! certified probabilistically: exact rational-coefficient expression trees
//! are sampled at seeded points and residuals compared against a
//! scale-relative tolerance, so every verdict is reproducible.

pub mod catalogue;
pub mod cli;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod integrate;
pub mod noether;
pub mod numutil;
pub mod reduction;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
