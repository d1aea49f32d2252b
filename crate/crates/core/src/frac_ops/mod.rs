//! ψ-fractional operators, the power-law re-scaling and the adaptive
//! quadrature used to evaluate operators directly from their definitions.

pub mod adaptive;
mod operators;
mod transform;

pub use operators::{
    caputo_power, caputo_power_coefficient, psi_caputo_numeric, psi_integral_numeric, psi_rl_derivative_numeric,
};
pub use transform::{FracOrder, TransformSpec};

pub use statrs::function::gamma::{gamma, ln_gamma};
