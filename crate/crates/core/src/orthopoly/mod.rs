//! Jacobi and Legendre polynomials, the generalized Jacobi time basis and
//! Gauss–Jacobi quadrature.

mod gauss;
mod gjp;
mod jacobi;

pub use gauss::{gauss_jacobi_rule, gauss_legendre_rule, jacobi_weight_integral, QuadratureRule};
pub use gjp::{legendre_phi, legendre_phi_all, legendre_phi_unchecked, phi_scale, TimeBasis};
pub use jacobi::{jacobi_eval, jacobi_eval_all, jacobi_eval_with_deriv, legendre_eval, JacobiIndex};
