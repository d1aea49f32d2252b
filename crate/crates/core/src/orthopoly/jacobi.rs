use crate::error::{Error, Result};

/// Exponent pair of the Jacobi weight `(1 - x)^alpha (1 + x)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiIndex {
    alpha: f64,
    beta: f64,
}

impl JacobiIndex {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::invalid(format!(
                "Jacobi exponents must exceed -1 (got alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Legendre index `(0, 0)`.
    pub const LEGENDRE: JacobiIndex = JacobiIndex {
        alpha: 0.0,
        beta: 0.0,
    };

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Index of the derivative family, `(alpha + 1, beta + 1)`.
    pub fn shifted(&self) -> JacobiIndex {
        JacobiIndex {
            alpha: self.alpha + 1.0,
            beta: self.beta + 1.0,
        }
    }
}

/// Recurrence coefficients of `P_{n+1} = (a x + b) P_n - c P_{n-1}` for `n >= 1`.
#[inline]
pub(super) fn recurrence(alpha: f64, beta: f64, n: usize) -> (f64, f64, f64) {
    let n = n as f64;
    let s = 2.0 * n + alpha + beta;
    let den = 2.0 * (n + 1.0) * (n + alpha + beta + 1.0) * s;
    let a = (s + 1.0) * (s + 2.0) * s / den;
    let b = (s + 1.0) * (alpha * alpha - beta * beta) / den;
    let c = 2.0 * (n + alpha) * (n + beta) * (s + 2.0) / den;
    (a, b, c)
}

#[inline]
fn first_degree(alpha: f64, beta: f64, x: f64) -> f64 {
    0.5 * ((alpha + beta + 2.0) * x + (alpha - beta))
}

/// Evaluates the Jacobi polynomial `P_n^{(alpha, beta)}(x)` by the three-term recurrence.
///
/// Points with `|x| > 1` are accepted and extrapolate the polynomial.
pub fn jacobi_eval(idx: JacobiIndex, n: usize, x: f64) -> f64 {
    let (alpha, beta) = (idx.alpha, idx.beta);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = first_degree(alpha, beta, x);
    for k in 1..n {
        let (a, b, c) = recurrence(alpha, beta, k);
        let next = (a * x + b) * cur - c * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Writes `P_0(x), ..., P_{out.len()-1}(x)` into `out`.
pub fn jacobi_eval_all(idx: JacobiIndex, x: f64, out: &mut [f64]) {
    let (alpha, beta) = (idx.alpha, idx.beta);
    let len = out.len();
    if len == 0 {
        return;
    }
    out[0] = 1.0;
    if len == 1 {
        return;
    }
    out[1] = first_degree(alpha, beta, x);
    for k in 1..len - 1 {
        let (a, b, c) = recurrence(alpha, beta, k);
        out[k + 1] = (a * x + b) * out[k] - c * out[k - 1];
    }
}

/// Value and first derivative of `P_n^{(alpha, beta)}` at `x`.
pub fn jacobi_eval_with_deriv(idx: JacobiIndex, n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let value = jacobi_eval(idx, n, x);
    let scale = 0.5 * (n as f64 + idx.alpha + idx.beta + 1.0);
    (value, scale * jacobi_eval(idx.shifted(), n - 1, x))
}

/// Legendre polynomial `L_n(x)`.
pub fn legendre_eval(n: usize, x: f64) -> f64 {
    jacobi_eval(JacobiIndex::LEGENDRE, n, x)
}
