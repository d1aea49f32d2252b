//! Gauss–Jacobi quadrature.
//!
//! Nodes come from the symmetric tridiagonal Jacobi matrix of the monic
//! three-term recurrence and are then polished by Newton's method on
//! `P_n`, carried out in the distance to the nearer endpoint so that nodes
//! clustered at a singular weight keep full relative precision. Weights use the closed form
//!
//! ```text
//! w_i = 2^{a+b+1} Γ(n+a+1) Γ(n+b+1) / (Γ(n+a+b+1) n!) / ((1 - x_i^2) P_n'(x_i)^2)
//! ```
//!
//! evaluated at the polished nodes, which is more accurate for small weights
//! than squaring eigenvector components.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::gamma;

use super::jacobi::{recurrence, JacobiIndex};
use crate::error::{Error, Result};

/// Newton steps are accepted once they shrink below this relative size.
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 12;
const NEWTON_STALL: f64 = 1e-12;

/// An `n`-point Gauss rule for `∫_lo^hi (hi - x)^alpha (x - lo)^beta f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
    index: JacobiIndex,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn index(&self) -> JacobiIndex {
        self.index
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Weighted sum `Σ w_i f(x_i)`, accumulated in node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// The same rule carried affinely onto `(lo, hi)`.
    pub fn mapped(&self, lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi)?;
        let (a, b) = self.interval;
        let ratio = (hi - lo) / (b - a);
        let scale = ratio.powf(self.index.alpha() + self.index.beta() + 1.0);
        Ok(Self {
            nodes: self.nodes.iter().map(|&x| lo + (x - a) * ratio).collect(),
            weights: self.weights.iter().map(|&w| w * scale).collect(),
            interval: (lo, hi),
            index: self.index,
        })
    }

    /// Sum of the weights, i.e. the rule's value for `f ≡ 1`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!(
            "quadrature interval must satisfy lo < hi (got ({lo}, {hi}))"
        )));
    }
    Ok(())
}

/// Jacobi matrix of the monic recurrence for `(1 - x)^alpha (1 + x)^beta`.
fn jacobi_matrix(idx: JacobiIndex, n: usize) -> DMatrix<f64> {
    let (a, b) = (idx.alpha(), idx.beta());
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        m[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * kf + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + a + b;
            let sq = if k == 0 {
                // Cancels the removable (1 + a + b) factor.
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = sq.sqrt();
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    m
}

/// Side of `[-1, 1]` a node is measured from; nodes are carried as `x = -1 + d` or `x = 1 - d`
/// so that the small distance `d` keeps full relative precision.
#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// `P_n` at `x = ∓1 ± d`, with the recurrence's affine factor formed in `d`.
fn eval_near_end(alpha: f64, beta: f64, n: usize, side: Side, d: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab2 = alpha + beta + 2.0;
    let mut prev = 1.0;
    let mut cur = match side {
        Side::Left => 0.5 * (ab2 * d - 2.0 * beta - 2.0),
        Side::Right => 0.5 * (2.0 * alpha + 2.0 - ab2 * d),
    };
    for k in 1..n {
        let (a, b, c) = recurrence(alpha, beta, k);
        let affine = match side {
            Side::Left => a * d + (b - a),
            Side::Right => (a + b) - a * d,
        };
        let next = affine * cur - c * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Below this `n^2 d` the endpoint series replaces the recurrence; its terms then
/// stay within a small factor of the result.
const SERIES_REACH: f64 = 2.0;

/// `(H, dH/dd)` for `H(d) = C(n + nu, n) 2F1(-n, n + a + b + 1; nu + 1; d / 2)`, the expansion of
/// `P_n` about the endpoint whose weight exponent is `nu`.
fn endpoint_series(a: f64, b: f64, nu: f64, n: usize, d: f64) -> (f64, f64) {
    let y = 0.5 * d;
    let nf = n as f64;
    let lead: f64 = (1..=n).map(|j| (j as f64 + nu) / j as f64).product();
    // coef_k y^k is the k-th term; the derivative sums k coef_k y^{k-1}
    let (mut coef, mut ypow) = (1.0, 1.0);
    let (mut value, mut slope) = (1.0, 0.0);
    for k in 0..n {
        let kf = k as f64;
        coef *= (kf - nf) * (kf + nf + a + b + 1.0) / ((kf + nu + 1.0) * (kf + 1.0));
        slope += (kf + 1.0) * coef * ypow;
        ypow *= y;
        value += coef * ypow;
    }
    (lead * value, 0.5 * lead * slope)
}

/// `(P_n, dP_n/dx)` at the node described by `(side, d)`.
fn eval_with_deriv_near_end(idx: JacobiIndex, n: usize, side: Side, d: f64) -> (f64, f64) {
    let (a, b) = (idx.alpha(), idx.beta());
    if (n * n) as f64 * d <= SERIES_REACH {
        // P_n(-1 + d) = (-1)^n H_b(d) and P_n(1 - d) = H_a(d)
        return match side {
            Side::Left => {
                let (h, dh) = endpoint_series(a, b, b, n, d);
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                (sign * h, sign * dh)
            }
            Side::Right => {
                let (h, dh) = endpoint_series(a, b, a, n, d);
                (h, -dh)
            }
        };
    }
    let value = eval_near_end(a, b, n, side, d);
    let scale = 0.5 * (n as f64 + a + b + 1.0);
    (value, scale * eval_near_end(a + 1.0, b + 1.0, n - 1, side, d))
}

fn polish_node(idx: JacobiIndex, n: usize, side: Side, mut d: f64) -> Result<(f64, f64)> {
    // dx/dd = +1 on the left, -1 on the right
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    for _ in 0..NEWTON_MAX_ITERS {
        let (p, dp) = eval_with_deriv_near_end(idx, n, side, d);
        let step = sign * p / dp;
        d -= step;
        if step.abs() <= NEWTON_TOL * d.abs() {
            let (_, dp) = eval_with_deriv_near_end(idx, n, side, d);
            return Ok((d, dp));
        }
    }
    let (p, dp) = eval_with_deriv_near_end(idx, n, side, d);
    // Steps that stall at roundoff level are accepted.
    if (p / dp).abs() <= NEWTON_STALL * d {
        return Ok((d, dp));
    }
    Err(Error::NoConvergence {
        context: "Gauss-Jacobi node refinement",
        estimate: d,
        error_bound: (p / dp).abs(),
    })
}

/// `B(a + 1, b + 1)`; exact when either index vanishes.
fn weight_beta(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        1.0 / (b + 1.0)
    } else if b == 0.0 {
        1.0 / (a + 1.0)
    } else {
        gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0)
    }
}

/// `2^{a+b+1} Γ(n+a+1) Γ(n+b+1) / (Γ(n+a+b+1) n!)` as `2^{a+b+1} B(a+1, b+1)` times
/// a product of ratios close to one, avoiding the cancellation of large log-gamma values.
fn weight_constant(a: f64, b: f64, n: usize) -> f64 {
    let mut c = 2f64.powf(a + b + 1.0) * weight_beta(a, b);
    c *= (1.0 + a) * (1.0 + b);
    for k in 2..=n {
        let k = k as f64;
        c *= (k + a) / k * ((k + b) / (k + a + b));
    }
    c
}

/// Builds the `n`-point Gauss–Jacobi rule for weight `(hi - x)^alpha (x - lo)^beta` on `(lo, hi)`.
///
/// The rule integrates polynomials of degree `<= 2n - 1` exactly against the weight.
pub fn gauss_jacobi_rule(idx: JacobiIndex, n: usize, interval: (f64, f64)) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("a Gauss rule needs at least one node"));
    }
    check_interval(interval.0, interval.1)?;
    let (a, b) = (idx.alpha(), idx.beta());

    let eig = SymmetricEigen::try_new(jacobi_matrix(idx, n), f64::EPSILON, 1000 * n).ok_or(
        Error::Numerical("Jacobi matrix eigenvalue iteration did not converge".into()),
    )?;
    let mut guesses: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    let c = weight_constant(a, b, n);

    let (lo, hi) = interval;
    let half = 0.5 * (hi - lo);
    let scale = half.powf(a + b + 1.0);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for g in guesses {
        let g = g.clamp(-1.0, 1.0);
        let side = if g <= 0.0 { Side::Left } else { Side::Right };
        let d0 = match side {
            Side::Left => 1.0 + g,
            Side::Right => 1.0 - g,
        };
        let (d, dp) = polish_node(idx, n, side, d0)?;
        if !(d > 0.0 && d < 2.0) {
            return Err(Error::Numerical(format!(
                "Gauss-Jacobi rule (alpha = {a}, beta = {b}, n = {n}) lost a node"
            )));
        }
        nodes.push(match side {
            Side::Left => lo + half * d,
            Side::Right => hi - half * d,
        });
        weights.push(scale * c / (d * (2.0 - d) * dp * dp));
    }

    let sorted = nodes.windows(2).all(|w| w[0] < w[1]);
    let inside = nodes.iter().all(|&x| x > lo && x < hi);
    let positive = weights.iter().all(|&w| w > 0.0 && w.is_finite());
    if !(sorted && inside && positive) {
        return Err(Error::Numerical(format!(
            "Gauss-Jacobi rule (alpha = {a}, beta = {b}, n = {n}) lost node ordering"
        )));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        interval,
        index: idx,
    })
}

/// `n`-point Gauss–Legendre rule on `(lo, hi)`.
pub fn gauss_legendre_rule(n: usize, lo: f64, hi: f64) -> Result<QuadratureRule> {
    gauss_jacobi_rule(JacobiIndex::LEGENDRE, n, (lo, hi))
}

/// `∫_lo^hi (hi - x)^alpha (x - lo)^beta dx = (hi - lo)^{alpha+beta+1} B(alpha + 1, beta + 1)`.
pub fn jacobi_weight_integral(idx: JacobiIndex, lo: f64, hi: f64) -> f64 {
    let (a, b) = (idx.alpha(), idx.beta());
    (hi - lo).powf(a + b + 1.0) * weight_beta(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn one_point_legendre() {
        let r = gauss_legendre_rule(1, -1.0, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r.nodes()[0].abs() < 1e-16);
        assert_relative_eq!(r.weights()[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn two_point_legendre() {
        let r = gauss_legendre_rule(2, -1.0, 1.0).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r.nodes()[0], -x, epsilon = 1e-15);
        assert_relative_eq!(r.nodes()[1], x, epsilon = 1e-15);
        for &w in r.weights() {
            assert_relative_eq!(w, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn chebyshev_closed_form() {
        let idx = JacobiIndex::new(-0.5, -0.5).unwrap();
        let r = gauss_jacobi_rule(idx, 3, (-1.0, 1.0)).unwrap();
        for i in 0..3 {
            // ascending order reverses cos((2i+1)π/6)
            let expected = ((2 * (2 - i) + 1) as f64 * PI / 6.0).cos();
            assert_relative_eq!(r.nodes()[i], expected, epsilon = 1e-15);
            assert_relative_eq!(r.weights()[i], PI / 3.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn rejects_empty_rule_and_bad_interval() {
        assert!(gauss_legendre_rule(0, -1.0, 1.0).is_err());
        assert!(gauss_legendre_rule(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn total_weight_matches_beta_function() {
        for &(a, b) in &[(0.0, 0.0), (-0.8, 0.0), (0.0, 5.0), (-0.3, 9.2), (0.7, -0.9)] {
            let idx = JacobiIndex::new(a, b).unwrap();
            for &(lo, hi) in &[(-1.0, 1.0), (0.0, 1.0), (0.0, 2f64.powf(0.2))] {
                let r = gauss_jacobi_rule(idx, 17, (lo, hi)).unwrap();
                assert_relative_eq!(
                    r.total_weight(),
                    jacobi_weight_integral(idx, lo, hi),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn mapping_scales_weights() {
        let idx = JacobiIndex::new(0.0, 2.0).unwrap();
        let r = gauss_jacobi_rule(idx, 4, (0.0, 2.0)).unwrap();
        // ∫_0^2 x^2 dx = 8/3
        assert_relative_eq!(r.total_weight(), 8.0 / 3.0, max_relative = 1e-14);
        // ∫_0^2 x^2 x^3 dx = 2^6/6
        assert_relative_eq!(r.integrate(|x| x.powi(3)), 64.0 / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn rule_construction_is_deterministic() {
        let idx = JacobiIndex::new(-0.2, 4.8).unwrap();
        let a = gauss_jacobi_rule(idx, 30, (0.0, 1.0)).unwrap();
        let b = gauss_jacobi_rule(idx, 30, (0.0, 1.0)).unwrap();
        assert_eq!(a, b);
    }
}
