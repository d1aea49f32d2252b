//! Spectral Galerkin solvers for time-fractional problems with singular
//! solutions.
//!
//! A Caputo problem of order `δ` in the physical time `s ∈ [0, T]` is
//! re-scaled by `s = t^{1/γ}` with `γ = 1/r`, which turns solution
//! components like `s^{k/r}` into polynomials in `t`. The re-scaled problem
//! is discretized with generalized Jacobi polynomials in `t` (and the
//! Dirichlet Legendre basis in space for the subdiffusion equation); all
//! singular factors of the stiffness integrals are absorbed into
//! Gauss–Jacobi weights.
//!
//! Modules:
//! - [`orthopoly`]: Jacobi/Legendre evaluation, the time basis, Gauss–Jacobi rules
//! - [`frac_ops`]: the transform, fractional operators and their quadrature oracles
//! - [`ode`]: the scalar problem `D^δ u + λ u = g`
//! - [`pde`]: the subdiffusion equation on `(-1, 1)^d`, `d = 1, 2`
//! - [`analysis`]: error norms and convergence studies
//! - [`catalog`]: the reference problems

pub mod analysis;
pub mod catalog;
mod error;
pub mod frac_ops;
pub mod linalg;
pub mod ode;
pub mod orthopoly;
pub mod par;
pub mod pde;

pub use error::{Error, Result};
pub use frac_ops::{FracOrder, TransformSpec};
pub use orthopoly::{JacobiIndex, QuadratureRule, TimeBasis};
pub use par::Backend;
