//! Space-time Galerkin solver for the re-scaled subdiffusion equation
//! `D^{δ,ψ}_t v = Δv - v + f` on `(-1, 1)^d × (0, T^γ)`, `d ∈ {1, 2}`, with
//! homogeneous Dirichlet data and `v(·, 0) = 0`.
//!
//! The unknown is `v = Σ_n Σ_c V[n, c] j_n(t) Φ_c(x)` where `Φ_c` runs over
//! the Dirichlet Legendre functions (d = 1) or their tensor products
//! `φ_k(x) φ_l(y)` with `c = k (M-1) + l` (d = 2). In that layout the
//! Galerkin equations are
//!
//! ```text
//! d = 1:  S V B + M V + M V B = F
//! d = 2:  S V (B⊗B) + M V (I⊗B + B⊗I) + M V (B⊗B) = F
//! ```
//!
//! and are solved mode by mode after diagonalising `B`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frac_ops::{FracOrder, TransformSpec};
use crate::linalg::{kron, max_abs, symmetric_eigen, DenseSolver, Matrix, Vector};
use crate::ode::{assemble_mass, assemble_rhs, assemble_stiffness, AssemblyOptions, PowerTerm, ScalarFn, TimeRhs};
use crate::orthopoly::{gauss_jacobi_rule, gauss_legendre_rule, legendre_phi_all, phi_scale, JacobiIndex, TimeBasis};

/// Extra Gauss–Legendre points per direction for spatial load integrals beyond `M`.
pub const SPACE_LOAD_GUARD: usize = 8;

/// Dirichlet Legendre basis `φ_0, ..., φ_{M-2}` per direction on `(-1, 1)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialBasis {
    m_modes: usize,
    dim: usize,
}

impl SpatialBasis {
    pub fn new(m_modes: usize, dim: usize) -> Result<Self> {
        if m_modes < 2 {
            return Err(Error::OutOfDomain {
                what: "M",
                value: m_modes as f64,
                lo: 2.0,
                hi: f64::INFINITY,
            });
        }
        if !(1..=2).contains(&dim) {
            return Err(Error::invalid(format!("spatial dimension must be 1 or 2 (got {dim})")));
        }
        Ok(Self { m_modes, dim })
    }

    pub fn m_modes(&self) -> usize {
        self.m_modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis functions per direction, `M - 1`.
    pub fn per_direction(&self) -> usize {
        self.m_modes - 1
    }

    /// Total number of spatial basis functions, `(M - 1)^d`.
    pub fn size(&self) -> usize {
        self.per_direction().pow(self.dim as u32)
    }

    /// Values `Φ_c(x)` of all spatial basis functions at `x`, `x.len() == d`.
    pub fn eval_all(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "expected a point with {} coordinates (got {})",
                self.dim,
                x.len()
            )));
        }
        let k = self.per_direction();
        let mut dirs = Vec::with_capacity(self.dim);
        for &xi in x {
            if !(-1.0..=1.0).contains(&xi) {
                return Err(Error::OutOfDomain {
                    what: "x",
                    value: xi,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
            let mut buf = vec![0.0; k];
            legendre_phi_all(xi, &mut buf);
            dirs.push(buf);
        }
        Ok(if self.dim == 1 {
            dirs.pop().expect("one direction")
        } else {
            let (a, b) = (&dirs[0], &dirs[1]);
            a.iter().flat_map(|&p| b.iter().map(move |&q| p * q)).collect()
        })
    }
}

/// One-direction matrices. The stiffness `A` is the identity since
/// `(φ_k', φ_j') = δ_jk`; only the mass `B` is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceMatrices {
    pub mass: Matrix,
}

impl SpaceMatrices {
    pub fn size(&self) -> usize {
        self.mass.nrows()
    }

    pub fn stiffness(&self) -> Matrix {
        Matrix::identity(self.size(), self.size())
    }
}

/// Mass matrix `b_jk = (φ_k, φ_j)` of `φ_k = c_k (L_k - L_{k+2})`, nonzero only for `|j - k| ∈ {0, 2}`.
pub fn space_mass_matrix(m_modes: usize) -> Result<SpaceMatrices> {
    let basis = SpatialBasis::new(m_modes, 1)?;
    let n = basis.per_direction();
    let mut mass = Matrix::zeros(n, n);
    for k in 0..n {
        let c = phi_scale(k);
        let kf = k as f64;
        mass[(k, k)] = c * c * (2.0 / (2.0 * kf + 1.0) + 2.0 / (2.0 * kf + 5.0));
        if k + 2 < n {
            let off = -c * phi_scale(k + 2) * 2.0 / (2.0 * kf + 5.0);
            mass[(k, k + 2)] = off;
            mass[(k + 2, k)] = off;
        }
    }
    Ok(SpaceMatrices { mass })
}

/// `Π_i X_i(x_i) · g(s)`.
#[derive(Clone)]
pub struct SeparableTerm {
    pub space: Vec<ScalarFn>,
    pub time: TimeRhs,
}

impl fmt::Debug for SeparableTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableTerm")
            .field("space", &format_args!("[{} factors]", self.space.len()))
            .field("time", &self.time)
            .finish()
    }
}

pub type SpaceTimeFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Source `g(x, s)` of the physical equation.
#[derive(Clone)]
pub enum SpaceTimeRhs {
    /// Sum of separable terms; time factors use the exact power-sum loads where possible.
    Separable(Vec<SeparableTerm>),
    /// General `g(x, s)` integrated by tensor quadrature.
    Function(SpaceTimeFn),
}

impl fmt::Debug for SpaceTimeRhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTimeRhs::Separable(terms) => f.debug_tuple("Separable").field(terms).finish(),
            SpaceTimeRhs::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl SpaceTimeRhs {
    pub fn eval(&self, x: &[f64], s: f64) -> f64 {
        match self {
            SpaceTimeRhs::Separable(terms) => terms
                .iter()
                .map(|t| t.space.iter().zip(x).map(|(f, &xi)| f(xi)).product::<f64>() * t.time.eval(s))
                .sum(),
            SpaceTimeRhs::Function(g) => g(x, s),
        }
    }
}

/// `D^δ u = Δu - u + g` on `(-1, 1)^d × (0, T]`.
#[derive(Debug, Clone)]
pub struct SpaceTimeProblem {
    pub delta: FracOrder,
    pub transform: TransformSpec,
    pub dim: usize,
    pub rhs: SpaceTimeRhs,
}

impl SpaceTimeProblem {
    pub fn new(delta: FracOrder, transform: TransformSpec, dim: usize, rhs: SpaceTimeRhs) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::invalid(format!("spatial dimension must be 1 or 2 (got {dim})")));
        }
        if let SpaceTimeRhs::Separable(terms) = &rhs {
            if terms.iter().any(|t| t.space.len() != dim) {
                return Err(Error::invalid("each separable term needs one spatial factor per dimension"));
            }
        }
        Ok(Self {
            delta,
            transform,
            dim,
            rhs,
        })
    }

    /// Problem with exact solution `u = Π_i sin(π x_i) s^σ`.
    pub fn manufactured_sine_power(delta: FracOrder, transform: TransformSpec, dim: usize, sigma: f64) -> Result<Self> {
        let reaction = dim as f64 * PI * PI + 1.0;
        let time = TimeRhs::manufactured(delta, reaction, &[PowerTerm::new(1.0, sigma)])?;
        let space: Vec<ScalarFn> = (0..dim).map(|_| Arc::new(|x: f64| (PI * x).sin()) as ScalarFn).collect();
        Self::new(delta, transform, dim, SpaceTimeRhs::Separable(vec![SeparableTerm { space, time }]))
    }
}

/// `∫_{-1}^{1} X(x) φ_k(x) dx` for every `k`, by `quad_n`-point Gauss–Legendre.
fn space_load_1d(x_fn: &dyn Fn(f64) -> f64, per_direction: usize, quad_n: usize) -> Result<Vec<f64>> {
    let rule = gauss_legendre_rule(quad_n, -1.0, 1.0)?;
    let mut out = vec![0.0; per_direction];
    let mut buf = vec![0.0; per_direction];
    for (x, w) in rule.iter() {
        let fx = x_fn(x);
        if !fx.is_finite() {
            return Err(Error::NonFinite(format!("spatial factor at x = {x}")));
        }
        legendre_phi_all(x, &mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o += w * fx * b;
        }
    }
    Ok(out)
}

/// Load tensor `F[n, c] = (f, j_n Φ_c)` as an `N × (M-1)^d` matrix.
pub fn assemble_spacetime_load(
    problem: &SpaceTimeProblem,
    time_basis: &TimeBasis,
    space_basis: &SpatialBasis,
    options: &AssemblyOptions,
) -> Result<Matrix> {
    check_bases(problem, time_basis, space_basis)?;
    let n_time = time_basis.n_modes();
    let k = space_basis.per_direction();
    let space_quad = space_basis.m_modes() + SPACE_LOAD_GUARD;
    let mut load = Matrix::zeros(n_time, space_basis.size());
    match &problem.rhs {
        SpaceTimeRhs::Separable(terms) => {
            for term in terms {
                let time = assemble_rhs(time_basis, &problem.transform, &term.time, options.load_guard)?;
                let dirs = term
                    .space
                    .iter()
                    .map(|f| space_load_1d(f.as_ref(), k, space_quad))
                    .collect::<Result<Vec<_>>>()?;
                let space: Vec<f64> = if problem.dim == 1 {
                    dirs[0].clone()
                } else {
                    dirs[0].iter().flat_map(|&p| dirs[1].iter().map(move |&q| p * q)).collect()
                };
                for n in 0..n_time {
                    for (c, sv) in space.iter().enumerate() {
                        load[(n, c)] += time[n] * sv;
                    }
                }
            }
        }
        SpaceTimeRhs::Function(g) => {
            let r = problem.transform.r() as f64;
            let time_rule = gauss_jacobi_rule(
                JacobiIndex::new(0.0, r - 1.0)?,
                n_time + options.load_guard,
                time_basis.interval(),
            )?;
            let space_rule = gauss_legendre_rule(space_quad, -1.0, 1.0)?;
            let points: Vec<(Vec<f64>, f64)> = if problem.dim == 1 {
                space_rule.iter().map(|(x, w)| (vec![x], w)).collect()
            } else {
                space_rule
                    .iter()
                    .flat_map(|(x, wx)| space_rule.iter().map(move |(y, wy)| (vec![x, y], wx * wy)))
                    .collect()
            };
            let space_values = points
                .iter()
                .map(|(x, _)| space_basis.eval_all(x))
                .collect::<Result<Vec<_>>>()?;
            let mut tb = vec![0.0; n_time];
            for (t, wt) in time_rule.iter() {
                time_basis.eval_all(t, &mut tb);
                let s = problem.transform.psi(t);
                for ((x, wx), phi) in points.iter().zip(&space_values) {
                    let f = g(x, s);
                    if !f.is_finite() {
                        return Err(Error::NonFinite(format!("right-hand side at x = {x:?}, s = {s}")));
                    }
                    let w = r * wt * wx * f;
                    for n in 0..n_time {
                        let wn = w * tb[n];
                        for (c, p) in phi.iter().enumerate() {
                            load[(n, c)] += wn * p;
                        }
                    }
                }
            }
        }
    }
    Ok(load)
}

fn check_bases(problem: &SpaceTimeProblem, time_basis: &TimeBasis, space_basis: &SpatialBasis) -> Result<()> {
    if space_basis.dim() != problem.dim {
        return Err(Error::invalid(format!(
            "spatial basis has dimension {} but the problem has {}",
            space_basis.dim(),
            problem.dim
        )));
    }
    if time_basis.interval().1 != problem.transform.right() {
        return Err(Error::invalid("time basis interval does not match the transform"));
    }
    Ok(())
}

/// Time matrices, spatial mass and load of a space-time problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSystem {
    pub stiffness: Matrix,
    pub mass: Matrix,
    pub space: SpaceMatrices,
    pub load: Matrix,
    pub dim: usize,
}

impl SpaceTimeSystem {
    /// `(B_d, A_d)`: the mass and stiffness of the full spatial basis,
    /// `(B, I)` for d = 1 and `(B⊗B, I⊗B + B⊗I)` for d = 2.
    pub fn spatial_operators(&self) -> (Matrix, Matrix) {
        let b = &self.space.mass;
        if self.dim == 1 {
            (b.clone(), self.space.stiffness())
        } else {
            let eye = self.space.stiffness();
            (kron(b, b), kron(&eye, b) + kron(b, &eye))
        }
    }

    /// Max-norm of the tensor residual relative to `‖F‖_max`.
    pub fn relative_residual(&self, v: &Matrix) -> f64 {
        let (bd, ad) = self.spatial_operators();
        let r = &self.stiffness * v * &bd + &self.mass * v * &ad + &self.mass * v * &bd - &self.load;
        let scale = max_abs(&self.load);
        if scale == 0.0 {
            max_abs(&r)
        } else {
            max_abs(&r) / scale
        }
    }
}

pub fn assemble_spacetime(
    problem: &SpaceTimeProblem,
    time_basis: &TimeBasis,
    space_basis: &SpatialBasis,
    options: &AssemblyOptions,
) -> Result<SpaceTimeSystem> {
    check_bases(problem, time_basis, space_basis)?;
    let stiffness = assemble_stiffness(
        time_basis,
        problem.delta,
        &problem.transform,
        time_basis.n_modes() + options.quad_guard.max(2),
        options.backend,
    )?;
    let mass = assemble_mass(time_basis, &problem.transform)?;
    let space = space_mass_matrix(space_basis.m_modes())?;
    let load = assemble_spacetime_load(problem, time_basis, space_basis, options)?;
    Ok(SpaceTimeSystem {
        stiffness,
        mass,
        space,
        load,
        dim: problem.dim,
    })
}

/// Discrete solution `u_L(x, s) = Σ V[n, c] j_n(s^γ) Φ_c(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSolution {
    coeffs: Matrix,
    time_basis: TimeBasis,
    space_basis: SpatialBasis,
    transform: TransformSpec,
    residual: f64,
}

impl SpaceTimeSolution {
    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn time_basis(&self) -> &TimeBasis {
        &self.time_basis
    }

    pub fn space_basis(&self) -> &SpatialBasis {
        &self.space_basis
    }

    pub fn transform(&self) -> &TransformSpec {
        &self.transform
    }

    /// Relative max-norm residual of the tensor equation.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    fn time_values(&self, s: f64) -> Result<Vec<f64>> {
        let t = self.transform.transform_sample(s)?.min(self.time_basis.interval().1);
        let mut tb = vec![0.0; self.time_basis.n_modes()];
        self.time_basis.eval_all(t, &mut tb);
        Ok(tb)
    }

    fn contract(&self, tb: &[f64], phi: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (n, tv) in tb.iter().enumerate() {
            if *tv == 0.0 {
                continue;
            }
            let row: f64 = phi.iter().enumerate().map(|(c, p)| self.coeffs[(n, c)] * p).sum();
            acc += tv * row;
        }
        acc
    }

    /// `u_L(x, s)` at one point.
    pub fn eval(&self, x: &[f64], s: f64) -> Result<f64> {
        let tb = self.time_values(s)?;
        let phi = self.space_basis.eval_all(x)?;
        Ok(self.contract(&tb, &phi))
    }

    /// Values on `s_points × x_points`: row `i` holds `u_L(·, s_i)` at every spatial point.
    pub fn evaluate(&self, x_points: &[Vec<f64>], s_points: &[f64]) -> Result<Matrix> {
        let phis = x_points
            .iter()
            .map(|x| self.space_basis.eval_all(x))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Matrix::zeros(s_points.len(), x_points.len());
        for (i, &s) in s_points.iter().enumerate() {
            let tb = self.time_values(s)?;
            for (j, phi) in phis.iter().enumerate() {
                out[(i, j)] = self.contract(&tb, phi);
            }
        }
        Ok(out)
    }
}

/// Evaluates `sol` on `s_points × x_points`; see [`SpaceTimeSolution::evaluate`].
pub fn evaluate_spacetime(sol: &SpaceTimeSolution, x_points: &[Vec<f64>], s_points: &[f64]) -> Result<Matrix> {
    sol.evaluate(x_points, s_points)
}

/// Solves the space-time system through the eigendecomposition of `B`.
pub fn solve_spacetime(
    problem: &SpaceTimeProblem,
    time_basis: &TimeBasis,
    space_basis: &SpatialBasis,
) -> Result<SpaceTimeSolution> {
    solve_spacetime_with(problem, time_basis, space_basis, &AssemblyOptions::default())
}

pub fn solve_spacetime_with(
    problem: &SpaceTimeProblem,
    time_basis: &TimeBasis,
    space_basis: &SpatialBasis,
    options: &AssemblyOptions,
) -> Result<SpaceTimeSolution> {
    let system = assemble_spacetime(problem, time_basis, space_basis, options)?;
    let coeffs = solve_system_eigen(&system, options)?;
    let residual = system.relative_residual(&coeffs);
    Ok(SpaceTimeSolution {
        coeffs,
        time_basis: *time_basis,
        space_basis: *space_basis,
        transform: problem.transform,
        residual,
    })
}

/// Mode-by-mode solve: `V = Ŵ Eᵀ_d` where column `c` of `Ŵ` solves `(μ_c S + (ν_c + μ_c) M) ŵ_c = (F E_d)_c`.
pub fn solve_system_eigen(system: &SpaceTimeSystem, options: &AssemblyOptions) -> Result<Matrix> {
    let (lambda, e) = symmetric_eigen(&system.space.mass)?;
    let k = lambda.len();
    let orth = max_abs(&(e.transpose() * &e - Matrix::identity(k, k)));
    if orth > 1e-12 {
        return Err(Error::Numerical(format!("spatial eigenvectors lose orthogonality ({orth:e})")));
    }
    let (e_full, factors): (Matrix, Vec<(f64, f64)>) = if system.dim == 1 {
        (e, lambda.iter().map(|&l| (l, 1.0)).collect())
    } else {
        let factors = (0..k * k)
            .map(|c| {
                let (a, b) = (lambda[c / k], lambda[c % k]);
                (a * b, a + b)
            })
            .collect();
        (kron(&e, &e), factors)
    };
    let f_hat = &system.load * &e_full;
    let columns = options.backend.try_map(factors.len(), |c| {
        let (mu, nu) = factors[c];
        let a = &system.stiffness * mu + &system.mass * (nu + mu);
        DenseSolver::new(&a)?.solve(&Vector::from(f_hat.column(c).into_owned()))
    })?;
    let w_hat = Matrix::from_columns(&columns);
    Ok(w_hat * e_full.transpose())
}

/// Direct solve of the Kronecker-expanded system; for validation at small sizes.
pub fn solve_system_dense(system: &SpaceTimeSystem) -> Result<Matrix> {
    let (bd, ad) = system.spatial_operators();
    // vec(X V Y) = (Yᵀ ⊗ X) vec(V) with column-major vec
    let big = kron(&bd, &system.stiffness) + kron(&ad, &system.mass) + kron(&bd, &system.mass);
    let rhs = Vector::from_column_slice(system.load.as_slice());
    let v = DenseSolver::new(&big)?.solve(&rhs)?;
    Ok(Matrix::from_column_slice(system.load.nrows(), system.load.ncols(), v.as_slice()))
}
