use super::jacobi::{jacobi_eval, jacobi_eval_all, legendre_eval, JacobiIndex};
use crate::error::{Error, Result};

/// Generalized Jacobi basis `j_n(t) = (1 + x(t)) P_{n-1}^{(alpha, 1)}(x(t))`, `n = 1..=N`,
/// on `(0, b)` with `x(t) = 2t/b - 1`.
///
/// Every basis function vanishes at `t = 0`; together they span the
/// polynomials of degree `<= N` with that property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBasis {
    alpha: f64,
    n_modes: usize,
    right: f64,
}

impl TimeBasis {
    pub fn new(alpha: f64, n_modes: usize, right: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("basis parameter alpha must exceed -1 (got {alpha})")));
        }
        if n_modes == 0 {
            return Err(Error::invalid("time basis needs at least one mode"));
        }
        if !(right > 0.0 && right.is_finite()) {
            return Err(Error::invalid(format!("time interval end must be positive (got {right})")));
        }
        Ok(Self {
            alpha,
            n_modes,
            right,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// `(a, b) = (0, T^γ)`.
    pub fn interval(&self) -> (f64, f64) {
        (0.0, self.right)
    }

    /// Reference coordinate `x(t)` in `[-1, 1]`.
    #[inline]
    pub fn reference_coord(&self, t: f64) -> f64 {
        2.0 * t / self.right - 1.0
    }

    /// Index `(alpha, 1)` of the polynomial factor.
    pub fn value_index(&self) -> JacobiIndex {
        JacobiIndex::new(self.alpha, 1.0).expect("alpha validated at construction")
    }

    /// Index `(alpha + 1, 0)` of the derivative family.
    pub fn deriv_index(&self) -> JacobiIndex {
        JacobiIndex::new(self.alpha + 1.0, 0.0).expect("alpha validated at construction")
    }

    fn check(&self, n: usize, t: f64) -> Result<()> {
        if n == 0 || n > self.n_modes {
            return Err(Error::invalid(format!(
                "basis index must lie in 1..={} (got {n})",
                self.n_modes
            )));
        }
        if !(0.0..=self.right).contains(&t) {
            return Err(Error::OutOfDomain {
                what: "t",
                value: t,
                lo: 0.0,
                hi: self.right,
            });
        }
        Ok(())
    }

    /// `j_n(t)`.
    pub fn eval(&self, n: usize, t: f64) -> Result<f64> {
        self.check(n, t)?;
        Ok(self.eval_unchecked(n, t))
    }

    /// `j_n(t)` without range checks; `t = 0` always yields exactly zero.
    #[inline]
    pub fn eval_unchecked(&self, n: usize, t: f64) -> f64 {
        let x = self.reference_coord(t);
        (1.0 + x) * jacobi_eval(self.value_index(), n - 1, x)
    }

    /// `dj_n/dt = (2n / b) P_{n-1}^{(alpha+1, 0)}(x(t))`.
    pub fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        self.check(n, t)?;
        Ok(self.deriv_unchecked(n, t))
    }

    #[inline]
    pub fn deriv_unchecked(&self, n: usize, t: f64) -> f64 {
        let x = self.reference_coord(t);
        2.0 * n as f64 / self.right * jacobi_eval(self.deriv_index(), n - 1, x)
    }

    /// Writes `j_1(t), ..., j_N(t)` into `out` (length `N`).
    pub fn eval_all(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_modes);
        let x = self.reference_coord(t);
        jacobi_eval_all(self.value_index(), x, out);
        let factor = 1.0 + x;
        out.iter_mut().for_each(|v| *v *= factor);
    }
}

/// Normalisation `c_k = 1/sqrt(4k + 6)` of the Dirichlet Legendre basis.
#[inline]
pub fn phi_scale(k: usize) -> f64 {
    1.0 / (4.0 * k as f64 + 6.0).sqrt()
}

/// Dirichlet Legendre basis `φ_k(x) = c_k (L_k(x) - L_{k+2}(x))`, zero at `x = ±1`.
pub fn legendre_phi(k: usize, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(legendre_phi_unchecked(k, x))
}

#[inline]
pub fn legendre_phi_unchecked(k: usize, x: f64) -> f64 {
    if x == 1.0 || x == -1.0 {
        return 0.0;
    }
    phi_scale(k) * (legendre_eval(k, x) - legendre_eval(k + 2, x))
}

/// Writes `φ_0(x), ..., φ_{out.len()-1}(x)` into `out`.
pub fn legendre_phi_all(x: f64, out: &mut [f64]) {
    let len = out.len();
    if x == 1.0 || x == -1.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let mut legendre = vec![0.0; len + 2];
    jacobi_eval_all(JacobiIndex::LEGENDRE, x, &mut legendre);
    for k in 0..len {
        out[k] = phi_scale(k) * (legendre[k] - legendre[k + 2]);
    }
}
