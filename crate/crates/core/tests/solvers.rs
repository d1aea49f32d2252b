use std::f64::consts::PI;
use std::sync::Arc;

use fracspec::analysis::{
    error_l2, error_linf, linf_distance, run_convergence_study, space_grid, spacetime_error_l2,
    spacetime_error_linf, L2Norm, StudyRequest, LINF_GRID,
};
use fracspec::catalog::{lookup, Reference};
use fracspec::frac_ops::adaptive::{integrate, Tolerance};
use fracspec::ode::{solve, PowerTerm, ScalarFn, TimeProblem, TimeRhs};
use fracspec::pde::{
    assemble_spacetime, assemble_spacetime_load, solve_spacetime, SeparableTerm, SpaceTimeProblem, SpaceTimeRhs,
    SpatialBasis,
};
use fracspec::ode::{assemble_rhs, AssemblyOptions};
use fracspec::{FracOrder, TimeBasis, TransformSpec};

fn order(d: f64) -> FracOrder {
    FracOrder::new(d).unwrap()
}

fn square(delta: f64, r: u32) -> TimeProblem {
    let spec = TransformSpec::new(r, 2.0).unwrap();
    TimeProblem::manufactured(order(delta), 1.0, spec, &[PowerTerm::new(1.0, 2.0)]).unwrap()
}

#[test]
fn square_round_trip() {
    let problem = square(0.5, 1);
    let sol = solve(&problem, &problem.basis(0.0, 4).unwrap()).unwrap();
    let values = sol.evaluate(&[0.5, 1.0, 1.5]).unwrap();
    for (v, e) in values.iter().zip([0.25, 1.0, 2.25]) {
        assert!((v - e).abs() <= 1e-12, "{v} vs {e}");
    }
    assert_eq!(sol.eval(0.0).unwrap(), 0.0);
}

#[test]
fn square_with_two_modes() {
    let problem = square(0.1, 1);
    let sol = solve(&problem, &problem.basis(0.0, 2).unwrap()).unwrap();
    assert!(error_linf(&sol, |s| s * s, LINF_GRID).unwrap() <= 1e-13);
    assert!(error_l2(&sol, |s| s * s, L2Norm::Physical).unwrap() <= 1e-13);
}

#[test]
fn initial_value_is_reproduced() {
    let spec = TransformSpec::new(2, 2.0).unwrap();
    // u = 3 + s: D u = 1 / Γ(2 - δ) s^{1-δ}, so g = that + λ (3 + s)
    let problem = TimeProblem::manufactured(order(0.4), 1.0, spec, &[PowerTerm::new(1.0, 1.0)])
        .unwrap()
        .with_initial_value(3.0);
    let sol = solve(&problem, &problem.basis(0.0, 4).unwrap()).unwrap();
    assert_eq!(sol.eval(0.0).unwrap(), 3.0);
}

#[test]
fn example2a_drops_tenfold_and_decays_monotonically() {
    let entry = lookup("example2a").unwrap();
    let study = run_convergence_study(entry, &StudyRequest::for_entry(entry)).unwrap();
    assert!(study.is_complete());
    let e: Vec<f64> = study.reports.iter().map(|r| r.l2_error).collect();
    // N = 2 is the first row, N = 6 the fifth
    assert!(e[4] * 10.0 <= e[0]);
    for w in e.windows(2) {
        assert!(w[1] <= w[0] || w[1] <= 1e-11, "{w:?}");
    }
}

#[test]
fn weak_monotonicity_and_algebraic_floor_for_irrational_power() {
    let entry = lookup("example2b").unwrap();
    let study = run_convergence_study(entry, &StudyRequest::for_entry(entry)).unwrap();
    assert!(study.reports.windows(2).all(|w| w[0].n_modes < w[1].n_modes));
    for w in study.reports.windows(2) {
        if w[0].l2_error > 1e-12 {
            assert!(w[1].l2_error <= 1.5 * w[0].l2_error, "N {}", w[1].n_modes);
        }
    }
    // Observed order between N = 4 and N = 12 is at least 1.
    let (a, b) = (&study.reports[0], &study.reports[4]);
    let rate = (a.l2_error / b.l2_error).ln() / (b.n_modes as f64 / a.n_modes as f64).ln();
    assert!(rate >= 1.0, "rate {rate}");
}

#[test]
fn sine_source_converges_only_with_the_transform() {
    let entry = lookup("example3").unwrap();
    let mut req = StudyRequest::for_entry(entry);
    req.resolutions = vec![6, 12, 18, 24, 30];
    let graded = run_convergence_study(entry, &req).unwrap();
    req.params.r = 1;
    let classical = run_convergence_study(entry, &req).unwrap();
    let g: Vec<f64> = graded.reports.iter().map(|r| r.l2_error).collect();
    let c: Vec<f64> = classical.reports.iter().map(|r| r.l2_error).collect();
    assert!(g.windows(2).all(|w| w[1] < w[0]), "{g:?}");
    assert!(g[4] <= 1e-10);
    // The classical basis only converges algebraically.
    let rate = (c[1] / c[4]).ln() / (30f64 / 12.0).ln();
    assert!(c[4] >= 1e-7 && rate < 5.0, "{c:?}, rate {rate}");
}

#[test]
fn study_rejects_bad_requests() {
    let entry = lookup("example3").unwrap();
    let mut req = StudyRequest::for_entry(entry);
    req.resolutions = vec![4, 4];
    assert!(run_convergence_study(entry, &req).is_err());
    req.resolutions = vec![4, 40];
    req.reference = Reference::SelfConvergence { n_ref: 60 };
    assert!(run_convergence_study(entry, &req).is_err());
}

#[test]
fn error_norms_are_consistent() {
    let problem = square(0.7, 2);
    let sol = solve(&problem, &problem.basis(0.0, 3).unwrap()).unwrap();
    let exact = |s: f64| s * s + 0.01 * (3.0 * s).sin();
    let linf = error_linf(&sol, exact, LINF_GRID).unwrap();
    let l2 = error_l2(&sol, exact, L2Norm::Physical).unwrap();
    assert!(linf > 0.0 && l2 > 0.0);
    assert!(l2 <= 2f64.sqrt() * linf * (1.0 + 1e-9));
    // Independent value: graded adaptive quadrature directly in s.
    let direct = integrate(
        |s| (sol.eval(s).unwrap() - exact(s)).powi(2),
        0.0,
        2.0,
        Tolerance::relative(1e-13),
        40,
    )
    .unwrap()
    .value
    .sqrt();
    assert!((direct - l2).abs() <= 1e-10 * l2, "{direct} vs {l2}");
    assert_eq!(error_l2(&sol, exact, L2Norm::PsiWeighted).unwrap(), l2);
    assert_eq!(linf_distance(|s| s, |s| s + 0.25, 2.0, 17).unwrap(), 0.25);
}

fn example4(n: usize, m: usize) -> (f64, f64, fracspec::pde::SpaceTimeSolution) {
    let entry = lookup("example4").unwrap();
    let problem = entry.spacetime_problem(&entry.params()).unwrap();
    let tb = TimeBasis::new(0.0, n, problem.transform.right()).unwrap();
    let sb = SpatialBasis::new(m, 2).unwrap();
    let sol = solve_spacetime(&problem, &tb, &sb).unwrap();
    let exact = entry.exact_spacetime().unwrap();
    let linf = spacetime_error_linf(&sol, exact.as_ref(), 2.0).unwrap();
    let l2 = spacetime_error_l2(&sol, exact.as_ref(), 2.0).unwrap();
    (linf, l2, sol)
}

#[test]
fn subdiffusion_centre_value_and_residual() {
    let (linf, _, sol) = example4(20, 20);
    assert!(linf <= 1e-9);
    assert!(sol.residual() <= 1e-10);
    assert!((sol.eval(&[0.5, 0.5], 2.0).unwrap() - 2f64.powf(0.6)).abs() <= 1e-8);
    assert!(linf.is_finite());
}

#[test]
fn subdiffusion_boundaries_vanish() {
    let (linf, _, sol) = example4(4, 4);
    assert!(linf.is_finite() && linf > 1e-9);
    for x in [-1.0, 1.0] {
        assert_eq!(sol.eval(&[x, 0.3], 1.0).unwrap(), 0.0);
        assert_eq!(sol.eval(&[0.3, x], 1.0).unwrap(), 0.0);
    }
    assert_eq!(sol.eval(&[0.2, 0.3], 0.0).unwrap(), 0.0);
}

#[test]
fn spatial_convergence_spans_six_orders() {
    let errors: Vec<f64> = [4usize, 6, 8, 10, 12, 14, 16].iter().map(|&m| example4(20, m).1).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[0] / errors[6] >= 1e6, "{errors:?}");
}

#[test]
fn zero_source_gives_zero_solution() {
    let spec = TransformSpec::new(3, 2.0).unwrap();
    let zero: SpaceTimeRhs = SpaceTimeRhs::Function(Arc::new(|_: &[f64], _: f64| 0.0));
    let problem = SpaceTimeProblem::new(order(0.5), spec, 2, zero).unwrap();
    let tb = TimeBasis::new(0.0, 5, spec.right()).unwrap();
    let sb = SpatialBasis::new(6, 2).unwrap();
    let sol = solve_spacetime(&problem, &tb, &sb).unwrap();
    assert!(sol.coeffs().iter().all(|&v| v == 0.0));
}

#[test]
fn separable_load_is_outer_product() {
    let spec = TransformSpec::new(2, 2.0).unwrap();
    let x_factor: ScalarFn = Arc::new(|x: f64| (1.0 - x * x) * (2.0 * x).exp());
    let time = TimeRhs::function(|s: f64| (PI * s).cos());
    let problem = SpaceTimeProblem::new(
        order(0.3),
        spec,
        1,
        SpaceTimeRhs::Separable(vec![SeparableTerm { space: vec![x_factor.clone()], time: time.clone() }]),
    )
    .unwrap();
    let tb = TimeBasis::new(0.0, 6, spec.right()).unwrap();
    let sb = SpatialBasis::new(7, 1).unwrap();
    let opts = AssemblyOptions::default();
    let load = assemble_spacetime_load(&problem, &tb, &sb, &opts).unwrap();
    let f_time = assemble_rhs(&tb, &spec, &time, opts.load_guard).unwrap();
    // spatial factor against φ_k with a generic function source of the same product
    let general = SpaceTimeProblem::new(
        order(0.3),
        spec,
        1,
        SpaceTimeRhs::Function(Arc::new(move |x: &[f64], s: f64| x_factor(x[0]) * (PI * s).cos())),
    )
    .unwrap();
    let g_load = assemble_spacetime_load(&general, &tb, &sb, &opts).unwrap();
    assert!((&load - &g_load).amax() <= 1e-12 * load.amax());
    let column_ratio = load.column(0).component_div(&f_time);
    assert!(column_ratio.iter().all(|&c| (c - column_ratio[0]).abs() <= 1e-12 * column_ratio[0].abs()));

    let system = assemble_spacetime(&problem, &tb, &sb, &opts).unwrap();
    assert_eq!(system.load, load);
    assert_eq!(space_grid(2).len(), 33 * 33);
}
