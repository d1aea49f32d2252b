//! Galerkin solver for the re-scaled scalar problem
//! `D^{δ,ψ} v + λ v = f` on `(0, T^γ)`, `v(0) = 0`.
//!
//! With `v = Σ ṽ_n j_n` the Galerkin equations read `(S + λM) ṽ = F` where
//!
//! ```text
//! S_mn = (D^{δ,ψ} j_n, j_m)_ψ,   M_mn = (j_n, j_m)_ψ,   F_m = (f, j_m)_ψ,
//! (v, w)_ψ = ∫ v w ψ'(t) dt.
//! ```
//!
//! Mapping both integration variables of `S_mn` to the unit interval
//! (`t = b s`, `z = τ t`) gives
//!
//! ```text
//! S_mn = 4 n r T^{1-δ} / Γ(1-δ) ∫_0^1 s^{(1-δ) r + 1} P_{m-1}^{(α,1)}(2s-1)
//!        ∫_0^1 (1-τ)^{-δ} (1 + τ + ... + τ^{r-1})^{-δ} P_{n-1}^{(α+1,0)}(2τs-1) dτ ds,
//! ```
//!
//! whose singular factors become Gauss–Jacobi weights.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frac_ops::{caputo_power_coefficient, gamma, FracOrder, TransformSpec};
use crate::linalg::{DenseSolver, Matrix, Vector};
use crate::orthopoly::{gauss_jacobi_rule, jacobi_eval, jacobi_eval_all, JacobiIndex, TimeBasis};
use crate::par::Backend;

/// Extra Gauss points for the stiffness rules beyond `N`.
pub const DEFAULT_QUAD_GUARD: usize = 8;
/// Extra Gauss points for general load integrals beyond `N`.
pub const DEFAULT_LOAD_GUARD: usize = 16;

/// `coeff * s^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Self { coeff, exponent }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if self.exponent == 0.0 {
            self.coeff
        } else {
            self.coeff * s.powf(self.exponent)
        }
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Right-hand side `g(s)` of the physical problem.
#[derive(Clone)]
pub enum TimeRhs {
    /// `g(s) = Σ c_k s^{e_k}` with `e_k > -1`; load integrals are computed exactly.
    PowerSum(Vec<PowerTerm>),
    /// Arbitrary `g(s)`; load integrals use Gauss–Jacobi quadrature.
    Function(ScalarFn),
}

impl fmt::Debug for TimeRhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeRhs::PowerSum(terms) => f.debug_tuple("PowerSum").field(terms).finish(),
            TimeRhs::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl TimeRhs {
    pub fn function<F: Fn(f64) -> f64 + Send + Sync + 'static>(g: F) -> Self {
        TimeRhs::Function(Arc::new(g))
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            TimeRhs::PowerSum(terms) => terms.iter().map(|p| p.eval(s)).sum(),
            TimeRhs::Function(g) => g(s),
        }
    }

    /// `c * g(s) + shift`.
    fn affine(&self, c: f64, shift: f64) -> TimeRhs {
        match self {
            TimeRhs::PowerSum(terms) => {
                let mut out: Vec<PowerTerm> = terms.iter().map(|p| PowerTerm::new(c * p.coeff, p.exponent)).collect();
                if shift != 0.0 {
                    out.push(PowerTerm::new(shift, 0.0));
                }
                TimeRhs::PowerSum(out)
            }
            TimeRhs::Function(g) => {
                let g = Arc::clone(g);
                TimeRhs::Function(Arc::new(move |s| c * g(s) + shift))
            }
        }
    }

    /// `g = D^δ u + λ u` for `u(s) = Σ c_k s^{σ_k}`, `σ_k > 0`.
    pub fn manufactured(delta: FracOrder, lambda: f64, solution: &[PowerTerm]) -> Result<Self> {
        let d = delta.value();
        let mut terms = Vec::with_capacity(2 * solution.len());
        for p in solution {
            if !(p.exponent > 0.0) {
                return Err(Error::invalid(format!(
                    "manufactured powers must be positive (got {})",
                    p.exponent
                )));
            }
            terms.push(PowerTerm::new(p.coeff * caputo_power_coefficient(d, p.exponent), p.exponent - d));
            terms.push(PowerTerm::new(lambda * p.coeff, p.exponent));
        }
        Ok(TimeRhs::PowerSum(terms))
    }
}

/// `D^δ u + λ u = g(s)` on `(0, T]`, `u(0) = φ`.
#[derive(Debug, Clone)]
pub struct TimeProblem {
    pub delta: FracOrder,
    pub lambda: f64,
    pub transform: TransformSpec,
    pub rhs: TimeRhs,
    pub phi: f64,
}

impl TimeProblem {
    pub fn new(delta: FracOrder, lambda: f64, transform: TransformSpec, rhs: TimeRhs) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be positive (got {lambda})")));
        }
        Ok(Self {
            delta,
            lambda,
            transform,
            rhs,
            phi: 0.0,
        })
    }

    /// Problem whose exact solution is `u(s) = Σ c_k s^{σ_k}`.
    pub fn manufactured(delta: FracOrder, lambda: f64, transform: TransformSpec, solution: &[PowerTerm]) -> Result<Self> {
        let rhs = TimeRhs::manufactured(delta, lambda, solution)?;
        Self::new(delta, lambda, transform, rhs)
    }

    pub fn with_initial_value(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    /// Right-hand side for the homogenised unknown `u - φ`.
    fn homogeneous_rhs(&self) -> TimeRhs {
        if self.phi == 0.0 {
            self.rhs.clone()
        } else {
            self.rhs.affine(1.0, -self.lambda * self.phi)
        }
    }

    /// Basis on `(0, T^γ)` matching this problem's transform.
    pub fn basis(&self, alpha: f64, n_modes: usize) -> Result<TimeBasis> {
        TimeBasis::new(alpha, n_modes, self.transform.right())
    }
}

/// Quadrature sizes and execution backend for assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyOptions {
    pub quad_guard: usize,
    pub load_guard: usize,
    pub backend: Backend,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            quad_guard: DEFAULT_QUAD_GUARD,
            load_guard: DEFAULT_LOAD_GUARD,
            backend: Backend::default(),
        }
    }
}

/// Stiffness `S`, mass `M` and load `F` of the discrete problem.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub stiffness: Matrix,
    pub mass: Matrix,
    pub load: Vector,
}

impl AssembledSystem {
    /// `S + λ M`.
    pub fn system_matrix(&self, lambda: f64) -> Matrix {
        &self.stiffness + &self.mass * lambda
    }
}

fn check_basis(basis: &TimeBasis, transform: &TransformSpec) -> Result<()> {
    let b = transform.right();
    if basis.interval().1 != b {
        return Err(Error::invalid(format!(
            "basis interval (0, {}) does not match the transform interval (0, {b})",
            basis.interval().1
        )));
    }
    Ok(())
}

/// Stiffness matrix `S_mn = (D^{δ,ψ} j_n, j_m)_ψ` by the double Gauss–Jacobi rule with `quad_n` points per level.
pub fn assemble_stiffness(
    basis: &TimeBasis,
    delta: FracOrder,
    transform: &TransformSpec,
    quad_n: usize,
    backend: Backend,
) -> Result<Matrix> {
    check_basis(basis, transform)?;
    let n_modes = basis.n_modes();
    if quad_n < n_modes + 2 {
        return Err(Error::invalid(format!(
            "stiffness quadrature needs at least N + 2 = {} points (got {quad_n})",
            n_modes + 2
        )));
    }
    let d = delta.value();
    let r = transform.r();
    let rf = r as f64;

    let outer = gauss_jacobi_rule(JacobiIndex::new(0.0, (1.0 - d) * rf + 1.0)?, quad_n, (0.0, 1.0))?;
    let inner = gauss_jacobi_rule(JacobiIndex::new(-d, 0.0)?, quad_n, (0.0, 1.0))?;
    let smooth: Vec<f64> = inner
        .nodes()
        .iter()
        .map(|&tau| {
            // 1 + τ + ... + τ^{r-1} by Horner
            let geometric = (0..r).fold(0.0, |acc, _| acc * tau + 1.0);
            geometric.powf(-d)
        })
        .collect();
    let value_idx = basis.value_index();
    let deriv_idx = basis.deriv_index();

    // inner[i][n-1] = Σ_j ŵ_j σ_j P_{n-1}^{(α+1,0)}(2 η_i τ_j - 1)
    let inner_sums: Vec<Vec<f64>> = backend.map(outer.len(), |i| {
        let eta = outer.nodes()[i];
        let mut acc = vec![0.0; n_modes];
        let mut buf = vec![0.0; n_modes];
        for (j, (tau, w)) in inner.iter().enumerate() {
            jacobi_eval_all(deriv_idx, 2.0 * eta * tau - 1.0, &mut buf);
            let ws = w * smooth[j];
            for (a, p) in acc.iter_mut().zip(&buf) {
                *a += ws * p;
            }
        }
        acc
    });
    let test_values: Vec<Vec<f64>> = outer
        .nodes()
        .iter()
        .map(|&eta| {
            let mut buf = vec![0.0; n_modes];
            jacobi_eval_all(value_idx, 2.0 * eta - 1.0, &mut buf);
            buf
        })
        .collect();

    let prefactor = 4.0 * rf * transform.horizon().powf(1.0 - d) / gamma(1.0 - d);
    let entries = backend.map(n_modes * n_modes, |e| {
        let (m, n) = (e / n_modes, e % n_modes);
        let sum: f64 = outer
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| w * test_values[i][m] * inner_sums[i][n])
            .sum();
        prefactor * (n + 1) as f64 * sum
    });
    Ok(Matrix::from_row_slice(n_modes, n_modes, &entries))
}

/// Mass matrix `M_mn = ∫_0^b j_n j_m r t^{r-1} dt`, exact by a Gauss–Jacobi rule of index `(0, r-1)`.
pub fn assemble_mass(basis: &TimeBasis, transform: &TransformSpec) -> Result<Matrix> {
    check_basis(basis, transform)?;
    let n_modes = basis.n_modes();
    let r = transform.r() as usize;
    let points = (2 * n_modes + r + 2).div_ceil(2);
    let rule = gauss_jacobi_rule(JacobiIndex::new(0.0, r as f64 - 1.0)?, points, basis.interval())?;
    let table = basis_table(basis, rule.nodes());
    let rf = r as f64;
    let mut mass = Matrix::zeros(n_modes, n_modes);
    for m in 0..n_modes {
        for n in m..n_modes {
            let v: f64 = rule
                .weights()
                .iter()
                .enumerate()
                .map(|(q, w)| w * table[q][m] * table[q][n])
                .sum();
            mass[(m, n)] = rf * v;
            mass[(n, m)] = rf * v;
        }
    }
    Ok(mass)
}

fn basis_table(basis: &TimeBasis, nodes: &[f64]) -> Vec<Vec<f64>> {
    nodes
        .iter()
        .map(|&t| {
            let mut buf = vec![0.0; basis.n_modes()];
            basis.eval_all(t, &mut buf);
            buf
        })
        .collect()
}

/// Load vector `F_m = ∫_0^b f(t) j_m(t) ψ'(t) dt` for a function of the transformed time `t`,
/// by the `quad_n`-point Gauss–Jacobi rule of index `(0, r-1)`.
pub fn assemble_load<F>(basis: &TimeBasis, transform: &TransformSpec, f: F, quad_n: usize) -> Result<Vector>
where
    F: Fn(f64) -> f64,
{
    check_basis(basis, transform)?;
    if quad_n == 0 {
        return Err(Error::invalid("load quadrature needs at least one point"));
    }
    let r = transform.r() as f64;
    let rule = gauss_jacobi_rule(JacobiIndex::new(0.0, r - 1.0)?, quad_n, basis.interval())?;
    let mut load = Vector::zeros(basis.n_modes());
    let mut buf = vec![0.0; basis.n_modes()];
    for (t, w) in rule.iter() {
        let ft = f(t);
        if !ft.is_finite() {
            return Err(Error::NonFinite(format!("right-hand side at t = {t}")));
        }
        basis.eval_all(t, &mut buf);
        for (l, b) in load.iter_mut().zip(&buf) {
            *l += r * w * ft * b;
        }
    }
    Ok(load)
}

/// Load vector of `g(s) = Σ c_k s^{e_k}`: each term becomes `c_k t^{r e_k}` and is integrated
/// exactly with a Gauss–Jacobi rule whose weight carries `t^{r e_k + r - 1}`.
pub fn assemble_power_load(basis: &TimeBasis, transform: &TransformSpec, terms: &[PowerTerm]) -> Result<Vector> {
    check_basis(basis, transform)?;
    let r = transform.r() as f64;
    let points = basis.n_modes() / 2 + 2;
    let mut load = Vector::zeros(basis.n_modes());
    let mut buf = vec![0.0; basis.n_modes()];
    for term in terms {
        if !(term.exponent > -1.0) || !term.coeff.is_finite() {
            return Err(Error::invalid(format!(
                "power term {} s^{} is not integrable at s = 0",
                term.coeff, term.exponent
            )));
        }
        if term.coeff == 0.0 {
            continue;
        }
        let weight_exp = r * term.exponent + r - 1.0;
        let rule = gauss_jacobi_rule(JacobiIndex::new(0.0, weight_exp)?, points, basis.interval())?;
        for (t, w) in rule.iter() {
            basis.eval_all(t, &mut buf);
            for (l, b) in load.iter_mut().zip(&buf) {
                *l += r * term.coeff * w * b;
            }
        }
    }
    Ok(load)
}

/// Load vector of a physical right-hand side `g(s)`, composed with `s = t^r`.
pub fn assemble_rhs(basis: &TimeBasis, transform: &TransformSpec, rhs: &TimeRhs, load_guard: usize) -> Result<Vector> {
    match rhs {
        TimeRhs::PowerSum(terms) => assemble_power_load(basis, transform, terms),
        TimeRhs::Function(g) => assemble_load(basis, transform, |t| g(transform.psi(t)), basis.n_modes() + load_guard),
    }
}

/// Assembles `S`, `M` and `F` for `problem` in `basis`.
pub fn assemble(problem: &TimeProblem, basis: &TimeBasis, options: &AssemblyOptions) -> Result<AssembledSystem> {
    let stiffness = assemble_stiffness(
        basis,
        problem.delta,
        &problem.transform,
        basis.n_modes() + options.quad_guard.max(2),
        options.backend,
    )?;
    let mass = assemble_mass(basis, &problem.transform)?;
    let load = assemble_rhs(basis, &problem.transform, &problem.homogeneous_rhs(), options.load_guard)?;
    Ok(AssembledSystem { stiffness, mass, load })
}

/// Discrete solution `u_N(s) = φ + Σ ṽ_n j_n(s^γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSolution {
    coeffs: Vector,
    basis: TimeBasis,
    transform: TransformSpec,
    phi: f64,
    residual: f64,
}

impl TimeSolution {
    /// Wraps given coefficients; `coeffs.len()` must equal the basis size.
    pub fn from_coefficients(basis: TimeBasis, transform: TransformSpec, coeffs: Vector, phi: f64) -> Result<Self> {
        check_basis(&basis, &transform)?;
        if coeffs.len() != basis.n_modes() {
            return Err(Error::invalid(format!(
                "expected {} coefficients (got {})",
                basis.n_modes(),
                coeffs.len()
            )));
        }
        Ok(Self {
            coeffs,
            basis,
            transform,
            phi,
            residual: 0.0,
        })
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }

    pub fn basis(&self) -> &TimeBasis {
        &self.basis
    }

    pub fn transform(&self) -> &TransformSpec {
        &self.transform
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Relative residual `‖(S + λM) ṽ - F‖_∞ / ‖F‖_∞` of the linear solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `v_N(t)` in the transformed variable, without the initial value.
    pub fn eval_transformed(&self, t: f64) -> f64 {
        let mut buf = vec![0.0; self.basis.n_modes()];
        self.basis.eval_all(t, &mut buf);
        buf.iter().zip(self.coeffs.iter()).map(|(b, c)| b * c).sum()
    }

    /// `u_N(s)` for a single point.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let t = self
            .transform
            .transform_sample(s)?
            .min(self.basis.interval().1);
        Ok(self.phi + self.eval_transformed(t))
    }

    /// `u_N` at each of `s_points`.
    pub fn evaluate(&self, s_points: &[f64]) -> Result<Vec<f64>> {
        s_points.iter().map(|&s| self.eval(s)).collect()
    }
}

/// Solves `(S + λM) ṽ = F` with default options.
pub fn solve(problem: &TimeProblem, basis: &TimeBasis) -> Result<TimeSolution> {
    solve_with(problem, basis, &AssemblyOptions::default())
}

pub fn solve_with(problem: &TimeProblem, basis: &TimeBasis, options: &AssemblyOptions) -> Result<TimeSolution> {
    let system = assemble(problem, basis, options)?;
    solve_assembled(problem, basis, &system)
}

/// Solves an already assembled system for `problem`.
pub fn solve_assembled(problem: &TimeProblem, basis: &TimeBasis, system: &AssembledSystem) -> Result<TimeSolution> {
    let a = system.system_matrix(problem.lambda);
    let solver = DenseSolver::new(&a)?;
    let coeffs = solver.solve(&system.load)?;
    let residual = relative_residual(&a, &coeffs, &system.load);
    Ok(TimeSolution {
        coeffs,
        basis: *basis,
        transform: problem.transform,
        phi: problem.phi,
        residual,
    })
}

pub(crate) fn relative_residual(a: &Matrix, x: &Vector, b: &Vector) -> f64 {
    let r = a * x - b;
    let scale = b.amax();
    if scale == 0.0 {
        r.amax()
    } else {
        r.amax() / scale
    }
}

/// `j_n` in the reference coordinate, exposed for oracles that integrate the basis directly.
pub fn basis_value(basis: &TimeBasis, n: usize, t: f64) -> f64 {
    let x = basis.reference_coord(t);
    (1.0 + x) * jacobi_eval(basis.value_index(), n - 1, x)
}
