//! ψ-fractional integrals and derivatives.
//!
//! The closed form for powers is exact; the `*_numeric` routines evaluate the
//! defining integrals by adaptive quadrature and serve as oracles for the
//! assembled matrices. Each integral over `z ∈ (0, t)` is split at `t/2`:
//! the half next to the kernel singularity is written in `u = t - z`, the
//! other half in `z`, so that both endpoint singularities sit at the origin
//! of their own variable, and `ψ(t) - ψ(t - u)` is evaluated without
//! cancellation.

use statrs::function::gamma::gamma;

use super::adaptive::{integrate, Tolerance};
use super::transform::{FracOrder, TransformSpec};
use crate::error::{Error, Result};

/// Geometric levels laid towards the kernel singularity.
const GRADING: u32 = 40;

/// Classical Caputo derivative of `s^σ`: `Γ(σ+1)/Γ(σ+1-δ) s^{σ-δ}`.
pub fn caputo_power(delta: FracOrder, sigma: f64, s: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("power sigma must be positive (got {sigma})")));
    }
    if !(s >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "s",
            value: s,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let d = delta.value();
    let coeff = caputo_power_coefficient(d, sigma);
    if s == 0.0 {
        return Ok(if sigma > d {
            0.0
        } else if sigma == d {
            coeff
        } else {
            f64::INFINITY
        });
    }
    Ok(coeff * s.powf(sigma - d))
}

/// `Γ(σ+1)/Γ(σ+1-δ)`.
pub fn caputo_power_coefficient(delta: f64, sigma: f64) -> f64 {
    gamma(sigma + 1.0) / gamma(sigma + 1.0 - delta)
}

/// `ψ(t) - ψ(t - u)` for `0 <= u <= t`, free of cancellation for small `u`.
#[inline]
fn psi_gap(spec: &TransformSpec, t: f64, u: f64) -> f64 {
    if spec.r() == 1 {
        return u;
    }
    -spec.psi(t) * (spec.r() as f64 * (-u / t).ln_1p()).exp_m1()
}

fn check_point(spec: &TransformSpec, t: f64, tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive (got {tol})")));
    }
    let b = spec.right();
    if !(0.0..=b).contains(&t) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t,
            lo: 0.0,
            hi: b,
        });
    }
    Ok(())
}

/// Left ψ-Caputo derivative
/// `(1/Γ(1-δ)) ∫_0^t (ψ(t) - ψ(z))^{-δ} v'(z) dz` of a function with derivative `dv`.
///
/// `tol` bounds the estimated absolute quadrature error.
pub fn psi_caputo_numeric<D>(spec: &TransformSpec, delta: FracOrder, dv: D, t: f64, tol: f64) -> Result<f64>
where
    D: Fn(f64) -> f64,
{
    check_point(spec, t, tol)?;
    psi_caputo_raw(spec, delta, &dv, t, tol)
}

/// `∫_0^t k(ψ(t) - ψ(z), z) dz` as two graded integrals meeting at `t/2`.
fn split_integral<K>(spec: &TransformSpec, t: f64, kernel: K, tol: f64) -> Result<f64>
where
    K: Fn(f64, f64) -> f64,
{
    let half = 0.5 * t;
    let psi_t = spec.psi(t);
    let near = integrate(
        |u| kernel(psi_gap(spec, t, u), t - u),
        0.0,
        half,
        Tolerance::absolute(0.5 * tol),
        GRADING,
    )?;
    let far = integrate(
        |z| kernel(psi_t - spec.psi(z), z),
        0.0,
        half,
        Tolerance::absolute(0.5 * tol),
        GRADING,
    )?;
    Ok(near.value + far.value)
}

fn psi_caputo_raw(spec: &TransformSpec, delta: FracOrder, dv: &dyn Fn(f64) -> f64, t: f64, tol: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let d = delta.value();
    let g = gamma(1.0 - d);
    let value = split_integral(spec, t, |gap, z| gap.powf(-d) * dv(z), tol * g)?;
    Ok(value / g)
}

/// Left ψ-fractional integral
/// `(1/Γ(δ)) ∫_0^t ψ'(z) (ψ(t) - ψ(z))^{δ-1} v(z) dz`.
pub fn psi_integral_numeric<V>(spec: &TransformSpec, delta: FracOrder, v: V, t: f64, tol: f64) -> Result<f64>
where
    V: Fn(f64) -> f64,
{
    check_point(spec, t, tol)?;
    psi_integral_raw(spec, delta.value(), &v, t, tol)
}

fn psi_integral_raw(spec: &TransformSpec, order: f64, v: &dyn Fn(f64) -> f64, t: f64, tol: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let g = gamma(order);
    let value = split_integral(
        spec,
        t,
        |gap, z| spec.psi_prime(z) * gap.powf(order - 1.0) * v(z),
        tol * g,
    )?;
    Ok(value / g)
}

/// Left ψ-Riemann–Liouville derivative `(1/ψ'(t)) d/dt I^{1-δ,ψ} v(t)`.
///
/// The outer derivative is a fourth-order central difference with step
/// proportional to `t`; the inner integrals are tightened so that their
/// noise stays below `tol` after differencing. Requires `t > 0`.
pub fn psi_rl_derivative_numeric<V>(spec: &TransformSpec, delta: FracOrder, v: V, t: f64, tol: f64) -> Result<f64>
where
    V: Fn(f64) -> f64,
{
    check_point(spec, t, tol)?;
    if t == 0.0 {
        return Err(Error::invalid("the Riemann-Liouville derivative is evaluated for t > 0"));
    }
    let order = 1.0 - delta.value();
    let h = t * (0.5 * tol.powf(0.25)).min(0.05);
    let inner_tol = tol * h * 0.05;
    let w = |x: f64| psi_integral_raw(spec, order, &v, x, inner_tol);
    let d = (w(t - 2.0 * h)? - 8.0 * w(t - h)? + 8.0 * w(t + h)? - w(t + 2.0 * h)?) / (12.0 * h);
    Ok(d / spec.psi_prime(t))
}
