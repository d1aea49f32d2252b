//! Error norms and convergence studies.

use std::sync::Arc;
use std::time::Instant;

use crate::catalog::{CatalogEntry, Params, Reference};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ode::{solve_with, AssemblyOptions, ScalarFn, TimeProblem, TimeSolution};
use crate::orthopoly::gauss_legendre_rule;
use crate::pde::{solve_spacetime_with, SpaceTimeSolution, SpatialBasis};

/// Uniform points used for maximum-norm errors.
pub const LINF_GRID: usize = 1001;
/// Panels and points per panel of the composite Gauss–Legendre rule for L² errors.
pub const L2_PANELS: usize = 20;
pub const L2_POINTS: usize = 10;
/// Points per direction of the spatial grid for space-time errors.
pub const SPACE_GRID: usize = 33;
/// Gauss–Legendre points per direction for spatial L² errors.
pub const SPACE_L2_POINTS: usize = 40;

/// Which L² norm of the error is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum L2Norm {
    /// `(∫_0^T (u_N - u)^2 ds)^{1/2}` in the physical variable.
    #[default]
    Physical,
    /// `(∫_0^{T^γ} (v_N - v)^2 ψ'(t) dt)^{1/2}`, the `L²_ψ` norm of the transformed error;
    /// equal to [`L2Norm::Physical`] by the substitution `s = ψ(t)`.
    PsiWeighted,
    /// `(∫_0^{T^γ} (v_N - v)^2 dt)^{1/2}`, the unweighted norm in the transformed variable.
    Transformed,
}

/// `n` uniformly spaced points on `[0, horizon]`, endpoints included.
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { horizon } else { horizon * i as f64 / last })
        .collect()
}

/// `max |f - g|` over `grid_n` uniform points of `[0, horizon]`.
pub fn linf_distance<F, G>(f: F, g: G, horizon: f64, grid_n: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if grid_n < 2 {
        return Err(Error::invalid(format!("the error grid needs at least 2 points (got {grid_n})")));
    }
    Ok(uniform_grid(horizon, grid_n)
        .into_iter()
        .map(|s| (f(s) - g(s)).abs())
        .fold(0.0, f64::max))
}

/// `(∫_lo^hi w(s) (f - g)^2 ds)^{1/2}` by the composite Gauss–Legendre rule.
fn composite_l2<F: Fn(f64) -> f64>(diff: F, lo: f64, hi: f64) -> Result<f64> {
    let h = (hi - lo) / L2_PANELS as f64;
    let mut acc = 0.0;
    for p in 0..L2_PANELS {
        let a = lo + p as f64 * h;
        let b = if p + 1 == L2_PANELS { hi } else { a + h };
        let rule = gauss_legendre_rule(L2_POINTS, a, b)?;
        acc += rule.integrate(|s| {
            let d = diff(s);
            d * d
        });
    }
    Ok(acc.sqrt())
}

/// Plain `L²(0, horizon)` distance in `s`.
pub fn l2_distance<F, G>(f: F, g: G, horizon: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    composite_l2(|s| f(s) - g(s), 0.0, horizon)
}

/// `max |u_N - u|` over `grid_n` uniform points of `[0, T]`.
pub fn error_linf<E: Fn(f64) -> f64>(sol: &TimeSolution, exact: E, grid_n: usize) -> Result<f64> {
    let horizon = sol.transform().horizon();
    if grid_n < 2 {
        return Err(Error::invalid(format!("the error grid needs at least 2 points (got {grid_n})")));
    }
    let mut worst = 0.0f64;
    for s in uniform_grid(horizon, grid_n) {
        worst = worst.max((sol.eval(s)? - exact(s)).abs());
    }
    Ok(worst)
}

/// L² error of `sol` against `exact(s)` in the selected norm.
pub fn error_l2<E: Fn(f64) -> f64>(sol: &TimeSolution, exact: E, norm: L2Norm) -> Result<f64> {
    let transform = *sol.transform();
    let b = transform.right();
    let phi = sol.phi();
    match norm {
        // ds = ψ'(t) dt: the physical norm is the ψ-weighted norm of the transformed error,
        // integrated in t where u_N is a polynomial and the integrand stays smooth.
        L2Norm::Physical | L2Norm::PsiWeighted => composite_l2(
            |t| (phi + sol.eval_transformed(t) - exact(transform.psi(t))) * transform.psi_prime(t).sqrt(),
            0.0,
            b,
        ),
        L2Norm::Transformed => composite_l2(|t| phi + sol.eval_transformed(t) - exact(transform.psi(t)), 0.0, b),
    }
}

/// Fine-resolution solve used as the surrogate exact solution.
pub fn self_convergence_reference(
    problem: &TimeProblem,
    n_ref: usize,
    alpha: f64,
    options: &AssemblyOptions,
) -> Result<TimeSolution> {
    let basis = problem.basis(alpha, n_ref)?;
    solve_with(problem, &basis, options)
}

/// Errors of one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub n_modes: usize,
    pub m_modes: Option<usize>,
    pub linf_error: f64,
    pub l2_error: f64,
    pub runtime_ms: f64,
}

/// A resolution whose solve failed; later resolutions were not attempted.
#[derive(Debug)]
pub struct StudyFailure {
    pub n_modes: usize,
    pub m_modes: Option<usize>,
    pub error: Error,
}

/// Inputs of a convergence study.
#[derive(Debug, Clone)]
pub struct StudyRequest {
    pub problem_id: String,
    pub params: Params,
    /// Time resolutions `N`, strictly increasing; for space-time studies the
    /// pairs `(N, M)` only have to move forward, so either may stay fixed.
    pub resolutions: Vec<usize>,
    /// Spatial resolutions `M` for space-time problems, one per `N`.
    pub space_resolutions: Option<Vec<usize>>,
    pub alpha: f64,
    pub options: AssemblyOptions,
    pub reference: Reference,
    pub norm: L2Norm,
    pub grid_n: usize,
}

impl StudyRequest {
    /// Request with the catalog defaults of `entry`.
    pub fn for_entry(entry: &CatalogEntry) -> Self {
        let space_resolutions = entry.default_m.map(|_| entry.study_n.to_vec());
        Self {
            problem_id: entry.id.to_string(),
            params: entry.params(),
            resolutions: entry.study_n.to_vec(),
            space_resolutions,
            alpha: 0.0,
            options: AssemblyOptions::default(),
            reference: entry.reference,
            norm: L2Norm::Physical,
            grid_n: LINF_GRID,
        }
    }
}

/// Results of a convergence study, ordered by resolution.
#[derive(Debug)]
pub struct ConvergenceStudy {
    pub problem_id: String,
    pub params: Params,
    pub reports: Vec<ErrorReport>,
    pub failure: Option<StudyFailure>,
}

impl ConvergenceStudy {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> Option<&ErrorReport> {
        self.reports.last()
    }
}

fn check_request(req: &StudyRequest) -> Result<()> {
    if req.resolutions.is_empty() {
        return Err(Error::invalid("a convergence study needs at least one resolution"));
    }
    match &req.space_resolutions {
        None => {
            if req.resolutions.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("resolutions must be strictly increasing"));
            }
        }
        Some(ms) => {
            if ms.len() != req.resolutions.len() {
                return Err(Error::invalid("expected one spatial resolution per time resolution"));
            }
            // Either sweep may hold still, but the pairs must move forward.
            let pairs: Vec<(usize, usize)> = req.resolutions.iter().copied().zip(ms.iter().copied()).collect();
            if pairs.windows(2).any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1 || w[1] == w[0]) {
                return Err(Error::invalid("resolution pairs (N, M) must increase in N or M and never decrease"));
            }
        }
    }
    if let Reference::SelfConvergence { n_ref } = req.reference {
        let largest = *req.resolutions.last().expect("non-empty");
        if n_ref < 2 * largest {
            return Err(Error::invalid(format!(
                "reference resolution {n_ref} must be at least twice the largest study resolution {largest}"
            )));
        }
    }
    Ok(())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs the study described by `req` on `entry`. Solve failures stop the
/// study and are returned alongside the completed rows; invalid requests
/// are errors.
pub fn run_convergence_study(entry: &CatalogEntry, req: &StudyRequest) -> Result<ConvergenceStudy> {
    check_request(req)?;
    let mut study = ConvergenceStudy {
        problem_id: req.problem_id.clone(),
        params: req.params,
        reports: Vec::with_capacity(req.resolutions.len()),
        failure: None,
    };
    if entry.is_spacetime() {
        run_spacetime(entry, req, &mut study)?;
    } else {
        run_scalar(entry, req, &mut study)?;
    }
    Ok(study)
}

fn run_scalar(entry: &CatalogEntry, req: &StudyRequest, study: &mut ConvergenceStudy) -> Result<()> {
    let problem = entry.time_problem(&req.params)?;
    let exact: ScalarFn = match req.reference {
        Reference::Exact => entry
            .exact_time()
            .ok_or_else(|| Error::invalid(format!("{} has no closed-form solution", entry.id)))?,
        Reference::SelfConvergence { n_ref } => {
            match self_convergence_reference(&problem, n_ref, req.alpha, &req.options) {
                Ok(reference) => Arc::new(move |s| reference.eval(s).unwrap_or(f64::NAN)),
                Err(error) => {
                    study.failure = Some(StudyFailure {
                        n_modes: n_ref,
                        m_modes: None,
                        error,
                    });
                    return Ok(());
                }
            }
        }
    };
    for &n in &req.resolutions {
        let start = Instant::now();
        let run = problem.basis(req.alpha, n).and_then(|basis| {
            let sol = solve_with(&problem, &basis, &req.options)?;
            let linf = error_linf(&sol, exact.as_ref(), req.grid_n)?;
            let l2 = error_l2(&sol, exact.as_ref(), req.norm)?;
            Ok((linf, l2))
        });
        match run {
            Ok((linf_error, l2_error)) => study.reports.push(ErrorReport {
                n_modes: n,
                m_modes: None,
                linf_error,
                l2_error,
                runtime_ms: elapsed_ms(start),
            }),
            Err(error) => {
                study.failure = Some(StudyFailure {
                    n_modes: n,
                    m_modes: None,
                    error,
                });
                break;
            }
        }
    }
    Ok(())
}

/// `SPACE_GRID` uniform points per direction on `[-1, 1]^d`.
pub fn space_grid(dim: usize) -> Vec<Vec<f64>> {
    let line: Vec<f64> = uniform_grid(2.0, SPACE_GRID).into_iter().map(|x| x - 1.0).collect();
    if dim == 1 {
        line.into_iter().map(|x| vec![x]).collect()
    } else {
        line.iter().flat_map(|&x| line.iter().map(move |&y| vec![x, y])).collect()
    }
}

/// Maximum error at `s` over the spatial grid [`space_grid`].
pub fn spacetime_error_linf<E>(sol: &SpaceTimeSolution, exact: E, s: f64) -> Result<f64>
where
    E: Fn(&[f64], f64) -> f64,
{
    let points = space_grid(sol.space_basis().dim());
    let values = sol.evaluate(&points, &[s])?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(j, x)| (values[(0, j)] - exact(x, s)).abs())
        .fold(0.0, f64::max))
}

/// Spatial `L²(Ω)` error at `s` by tensor Gauss–Legendre quadrature.
pub fn spacetime_error_l2<E>(sol: &SpaceTimeSolution, exact: E, s: f64) -> Result<f64>
where
    E: Fn(&[f64], f64) -> f64,
{
    let rule = gauss_legendre_rule(SPACE_L2_POINTS, -1.0, 1.0)?;
    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = if sol.space_basis().dim() == 1 {
        rule.iter().map(|(x, w)| (vec![x], w)).unzip()
    } else {
        rule.iter()
            .flat_map(|(x, wx)| rule.iter().map(move |(y, wy)| (vec![x, y], wx * wy)))
            .unzip()
    };
    let values: Matrix = sol.evaluate(&points, &[s])?;
    let sum: f64 = points
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(j, (x, w))| {
            let d = values[(0, j)] - exact(x, s);
            w * d * d
        })
        .sum();
    Ok(sum.sqrt())
}

fn run_spacetime(entry: &CatalogEntry, req: &StudyRequest, study: &mut ConvergenceStudy) -> Result<()> {
    let problem = entry.spacetime_problem(&req.params)?;
    let exact = entry
        .exact_spacetime()
        .ok_or_else(|| Error::invalid(format!("{} has no closed-form solution", entry.id)))?;
    let ms = req
        .space_resolutions
        .clone()
        .unwrap_or_else(|| vec![entry.default_m.unwrap_or(20); req.resolutions.len()]);
    let horizon = req.params.horizon;
    for (&n, &m) in req.resolutions.iter().zip(&ms) {
        let start = Instant::now();
        let run = (|| {
            let tb = crate::orthopoly::TimeBasis::new(req.alpha, n, problem.transform.right())?;
            let sb = SpatialBasis::new(m, problem.dim)?;
            let sol = solve_spacetime_with(&problem, &tb, &sb, &req.options)?;
            let linf = spacetime_error_linf(&sol, exact.as_ref(), horizon)?;
            let l2 = spacetime_error_l2(&sol, exact.as_ref(), horizon)?;
            Ok::<_, Error>((linf, l2))
        })();
        match run {
            Ok((linf_error, l2_error)) => study.reports.push(ErrorReport {
                n_modes: n,
                m_modes: Some(m),
                linf_error,
                l2_error,
                runtime_ms: elapsed_ms(start),
            }),
            Err(error) => {
                study.failure = Some(StudyFailure {
                    n_modes: n,
                    m_modes: Some(m),
                    error,
                });
                break;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::frac_ops::TransformSpec;
    use crate::linalg::Vector;
    use crate::orthopoly::TimeBasis;
    use approx::assert_relative_eq;

    #[test]
    fn grid_has_exact_endpoints() {
        let g = uniform_grid(2.0, LINF_GRID);
        assert_eq!(g.len(), 1001);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1000], 2.0);
    }

    #[test]
    fn offset_gives_exact_distance() {
        // dyadic grid points keep s + 0.25 exact
        let d = linf_distance(|s| s, |s| s + 0.25, 2.0, 9).unwrap();
        assert_eq!(d, 0.25);
        assert!(linf_distance(|s| s, |s| s, 2.0, 1).is_err());
    }

    #[test]
    fn l2_of_known_polynomial() {
        // ∫_0^2 (s^2 - s)^2 ds = 16/15
        let d = l2_distance(|s| s * s, |s| s, 2.0).unwrap();
        assert_relative_eq!(d, (16.0f64 / 15.0).sqrt(), max_relative = 1e-12);
        assert!(l2_distance(|s: f64| s.sin(), |s: f64| s.sin(), 2.0).unwrap() <= 1e-15);
    }

    #[test]
    fn l2_norms_agree_where_they_should() {
        let transform = TransformSpec::new(3, 2.0).unwrap();
        let basis = TimeBasis::new(0.0, 2, transform.right()).unwrap();
        let sol = TimeSolution::from_coefficients(basis, transform, Vector::from_vec(vec![0.5, 0.25]), 0.0).unwrap();
        let zero = |_: f64| 0.0;
        let physical = error_l2(&sol, zero, L2Norm::Physical).unwrap();
        let weighted = error_l2(&sol, zero, L2Norm::PsiWeighted).unwrap();
        assert_eq!(physical, weighted);
        assert!(error_l2(&sol, zero, L2Norm::Transformed).unwrap() > 0.0);
    }

    #[test]
    fn solution_against_itself() {
        let entry = lookup("example3").unwrap();
        let problem = entry.time_problem(&entry.params()).unwrap();
        let opts = AssemblyOptions::default();
        let reference = self_convergence_reference(&problem, 12, 0.0, &opts).unwrap();
        let same = self_convergence_reference(&problem, 12, 0.0, &opts).unwrap();
        assert_eq!(error_linf(&same, |s| reference.eval(s).unwrap(), LINF_GRID).unwrap(), 0.0);
    }

    #[test]
    fn invalid_requests() {
        let entry = lookup("example3").unwrap();
        let mut req = StudyRequest::for_entry(entry);
        req.reference = Reference::SelfConvergence { n_ref: 40 };
        assert!(run_convergence_study(entry, &req).is_err());
        req.reference = Reference::SelfConvergence { n_ref: 60 };
        req.resolutions = vec![4, 4];
        assert!(run_convergence_study(entry, &req).is_err());
    }

    #[test]
    fn failing_member_keeps_partial_rows() {
        // r = 8 at N = 120 exceeds the condition limit of the linear solver.
        let entry = lookup("example2b").unwrap();
        let mut req = StudyRequest::for_entry(entry);
        req.params.r = 8;
        req.resolutions = vec![4, 8, 120, 140];
        let study = run_convergence_study(entry, &req).unwrap();
        assert_eq!(study.reports.len(), 2);
        let failure = study.failure.expect("N = 120 is ill-conditioned");
        assert_eq!(failure.n_modes, 120);
        assert!(failure.error.is_numerical());
    }

    #[test]
    fn spacetime_pairs_may_hold_one_sweep_fixed() {
        let entry = lookup("example4").unwrap();
        let mut req = StudyRequest::for_entry(entry);
        req.resolutions = vec![6, 6, 6];
        req.space_resolutions = Some(vec![4, 6, 8]);
        let study = run_convergence_study(entry, &req).unwrap();
        assert_eq!(study.reports.len(), 3);
        assert!(study.reports[2].l2_error < study.reports[0].l2_error);
        req.space_resolutions = Some(vec![4, 4, 8]);
        assert!(run_convergence_study(entry, &req).is_err());
        req.space_resolutions = Some(vec![8, 6, 10]);
        assert!(run_convergence_study(entry, &req).is_err());
    }
}
