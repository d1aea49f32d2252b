//! Independent reference computations shared by the integration tests.
//!
//! Nothing here reuses the Gauss–Jacobi machinery under test: polynomials
//! come from the explicit Jacobi sum, integrals from adaptive Gauss–Kronrod
//! quadrature laid out directly on the defining formulas.

#![allow(dead_code)]

use fracspec::frac_ops::adaptive::{integrate, Tolerance};
use fracspec::frac_ops::{gamma, psi_caputo_numeric};
use fracspec::{FracOrder, TimeBasis, TransformSpec};
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

/// Geometric levels toward singular endpoints.
pub const GRADING: u32 = 40;

/// Generalised binomial coefficient `C(x, k)`.
pub fn binom(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// `P_n^{(a,b)}(x) = Σ_k C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^{n-k}`.
pub fn jacobi_explicit(a: f64, b: f64, n: usize, x: f64) -> f64 {
    let (lm, lp) = (0.5 * (x - 1.0), 0.5 * (x + 1.0));
    (0..=n)
        .map(|k| binom(n as f64 + a, n - k) * binom(n as f64 + b, k) * lm.powi(k as i32) * lp.powi((n - k) as i32))
        .sum()
}

/// Monomial coefficients of `j_n` in `y = t/b`: `j_n = 2y P_{n-1}^{(a,1)}(2y - 1)`.
pub fn gjp_monomials(alpha: f64, n: usize) -> Vec<f64> {
    // (x-1)/2 = y - 1, (x+1)/2 = y
    let deg = n - 1;
    let mut p = vec![0.0; deg + 1];
    for k in 0..=deg {
        let c = binom(deg as f64 + alpha, deg - k) * binom(deg as f64 + 1.0, k);
        // (y - 1)^k y^{deg-k}
        for i in 0..=k {
            let term = c * binom(k as f64, i) * if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            p[i + deg - k] += term;
        }
    }
    let mut out = vec![0.0; n + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] = 2.0 * c;
    }
    out
}

/// `∫_0^b j_n j_m r t^{r-1} dt` from the monomial expansion (exact up to rounding).
pub fn mass_exact(alpha: f64, spec: &TransformSpec, n: usize, m: usize) -> f64 {
    let (p, q) = (gjp_monomials(alpha, n), gjp_monomials(alpha, m));
    let r = spec.r() as f64;
    let mut acc = 0.0;
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            // ∫_0^b (t/b)^k r t^{r-1} dt = b^r r / (k + r) and b^r = T
            acc += a * b * spec.horizon() * r / ((i + j) as f64 + r);
        }
    }
    acc
}

fn binom_int(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Rational monomial coefficients of the `α = 0` basis function `j_n` in `y = t/b`.
pub fn gjp_monomials_exact(n: usize) -> Vec<BigRational> {
    let deg = n - 1;
    let mut out = vec![BigRational::zero(); n + 1];
    for k in 0..=deg {
        let c = binom_int(deg, deg - k) * binom_int(deg + 1, k);
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
            out[i + deg - k + 1] += BigRational::from_integer(BigInt::from(2 * sign) * &c * binom_int(k, i));
        }
    }
    out
}

/// Exact `α = 0` mass entry: `T Σ p_i q_j r / (i + j + r)` in rational arithmetic, rounded once.
pub fn mass_exact_rational(spec: &TransformSpec, n: usize, m: usize) -> f64 {
    let (p, q) = (gjp_monomials_exact(n), gjp_monomials_exact(m));
    let r = spec.r() as usize;
    let mut acc = BigRational::zero();
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            acc += a * b * BigRational::new(BigInt::from(r), BigInt::from(i + j + r));
        }
    }
    acc.to_f64().unwrap() * spec.horizon()
}

/// `j_n(t)` from the explicit Jacobi sum.
pub fn gjp_explicit(alpha: f64, b: f64, n: usize, t: f64) -> f64 {
    let x = 2.0 * t / b - 1.0;
    (1.0 + x) * jacobi_explicit(alpha, 1.0, n - 1, x)
}

/// `∫_0^b j_n j_m r t^{r-1} dt` by Gauss–Kronrod on the explicit polynomials;
/// a single 15-point Kronrod panel is exact through degree 22.
pub fn mass_quadrature(alpha: f64, spec: &TransformSpec, n: usize, m: usize) -> f64 {
    let b = spec.right();
    integrate(
        |t| gjp_explicit(alpha, b, n, t) * gjp_explicit(alpha, b, m, t) * spec.psi_prime(t),
        0.0,
        b,
        Tolerance::relative(1e-15),
        0,
    )
    .expect("mass oracle")
    .value
}

/// `(D^{δ,ψ} j_n, j_m)_ψ` by nested adaptive quadrature of the definition.
pub fn stiffness_oracle(basis: &TimeBasis, delta: FracOrder, spec: &TransformSpec, m: usize, n: usize) -> f64 {
    let b = basis.interval().1;
    let integrand = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let d = psi_caputo_numeric(spec, delta, |z| basis.deriv_unchecked(n, z), t, 1e-13).expect("inner oracle");
        d * basis.eval_unchecked(m, t) * spec.psi_prime(t)
    };
    integrate(integrand, 0.0, b, Tolerance::relative(1e-11), 12).expect("outer oracle").value
}

/// `∫_0^b g(ψ(t)) j_m(t) ψ'(t) dt` by adaptive quadrature graded toward `t = 0`.
pub fn load_oracle<G: Fn(f64) -> f64>(basis: &TimeBasis, spec: &TransformSpec, g: G, m: usize) -> f64 {
    let b = basis.interval().1;
    integrate(
        |t| if t == 0.0 { 0.0 } else { g(spec.psi(t)) * basis.eval_unchecked(m, t) * spec.psi_prime(t) },
        0.0,
        b,
        Tolerance::relative(1e-13),
        GRADING,
    )
    .expect("load oracle")
    .value
}

/// `ψ(t + u) - ψ(t)` without cancellation, `t > 0`.
pub fn forward_gap(spec: &TransformSpec, t: f64, u: f64) -> f64 {
    spec.psi(t) * (spec.r() as f64 * (u / t).ln_1p()).exp_m1()
}

/// Right ψ-Caputo derivative `-(1/Γ(1-δ)) ∫_t^b (ψ(z) - ψ(t))^{-δ} w'(z) dz`.
pub fn right_caputo<D: Fn(f64) -> f64>(spec: &TransformSpec, delta: f64, dw: D, t: f64, tol: f64) -> f64 {
    let b = spec.right();
    if t >= b {
        return 0.0;
    }
    let g = gamma(1.0 - delta);
    let gap = |u: f64| if t == 0.0 { spec.psi(u) } else { forward_gap(spec, t, u) };
    let est = integrate(|u| gap(u).powf(-delta) * dw(t + u), 0.0, b - t, Tolerance::absolute(tol * g), GRADING)
        .expect("right Caputo oracle");
    -est.value / g
}

/// `|a - b| <= tol * |b|`, with the scale floored at `floor`.
pub fn rel_close(a: f64, b: f64, tol: f64, floor: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(floor)
}
