//! The four subcommands. CSV goes to `--out` or standard output; the run
//! header and the error summary go to standard error.

use fracspec::analysis::{
    error_l2, error_linf, run_convergence_study, self_convergence_reference, space_grid, spacetime_error_l2,
    spacetime_error_linf, uniform_grid, StudyRequest, LINF_GRID,
};
use fracspec::catalog::{entries, ProblemKind, Reference};
use fracspec::ode::solve_with;
use fracspec::pde::{solve_spacetime_with, SpatialBasis};
use fracspec::TimeBasis;

use crate::config::{usage, CliError, RunConfig};
use crate::output::{real, Csv};

fn gamma_label(r: u32) -> String {
    if r == 1 {
        "1".into()
    } else {
        format!("1/{r}")
    }
}

pub fn list_problems() -> Csv {
    let mut csv = Csv::new(&["id", "kind", "delta", "gamma", "lambda", "T", "N", "M", "exact", "summary"]);
    for e in entries() {
        let kind = match e.kind {
            ProblemKind::ScalarPower | ProblemKind::ScalarSine => "ode".to_string(),
            ProblemKind::Subdiffusion { dim } => format!("pde-{dim}d"),
        };
        csv.row(&[
            e.id.into(),
            kind,
            e.delta.to_string(),
            gamma_label(e.r),
            e.lambda.to_string(),
            e.horizon.to_string(),
            e.default_n.to_string(),
            e.default_m.map_or(String::new(), |m| m.to_string()),
            e.has_exact().to_string(),
            format!("\"{}\"", e.summary),
        ]);
    }
    csv
}

pub fn solve_ode(cfg: &RunConfig) -> Result<Csv, CliError> {
    let entry = cfg.entry;
    if entry.is_spacetime() {
        return Err(usage(format!("{} is a space-time problem; use solve-pde", entry.id)));
    }
    if cfg.space_resolutions.is_some() {
        return Err(usage("--M only applies to space-time problems"));
    }
    let n = RunConfig::single(&cfg.resolutions, "N", entry.default_n)?;
    let problem = entry.time_problem(&cfg.params)?;
    let basis = problem.basis(cfg.alpha, n)?;
    let sol = solve_with(&problem, &basis, &cfg.options)?;
    let grid = uniform_grid(cfg.params.horizon, LINF_GRID);
    let values = sol.evaluate(&grid)?;

    let exact = entry.exact_time();
    let mut csv = match exact {
        Some(_) => Csv::new(&["s", "u_numeric", "u_exact", "abs_error"]),
        None => Csv::new(&["s", "u_numeric"]),
    };
    for (&s, &u) in grid.iter().zip(&values) {
        match &exact {
            Some(f) => {
                let e = f(s);
                csv.row(&[real(s), real(u), real(e), real((u - e).abs())]);
            }
            None => csv.row(&[real(s), real(u)]),
        }
    }

    let summary = match (&exact, cfg.ref_n.or(match entry.reference {
        Reference::SelfConvergence { n_ref } => Some(n_ref),
        Reference::Exact => None,
    })) {
        (Some(f), None) => format!(
            "linf_error={:.6e} l2_error={:.6e}",
            error_linf(&sol, f.as_ref(), LINF_GRID)?,
            error_l2(&sol, f.as_ref(), cfg.norm)?
        ),
        (_, Some(n_ref)) => {
            let reference = self_convergence_reference(&problem, n_ref, cfg.alpha, &cfg.options)?;
            let r = |s: f64| reference.eval(s).unwrap_or(f64::NAN);
            format!(
                "linf_error={:.6e} l2_error={:.6e} (against N={n_ref} reference)",
                error_linf(&sol, r, LINF_GRID)?,
                error_l2(&sol, r, cfg.norm)?
            )
        }
        (None, None) => "no reference solution".into(),
    };
    eprintln!("solve-ode: N={n} {summary} residual={:.3e}", sol.residual());
    Ok(csv)
}

pub fn solve_pde(cfg: &RunConfig) -> Result<Csv, CliError> {
    let entry = cfg.entry;
    if !entry.is_spacetime() {
        return Err(usage(format!("{} is a scalar problem; use solve-ode", entry.id)));
    }
    let n = RunConfig::single(&cfg.resolutions, "N", entry.default_n)?;
    let m = RunConfig::single(&cfg.space_resolutions, "M", entry.default_m.unwrap_or(20))?;
    let problem = entry.spacetime_problem(&cfg.params)?;
    let time_basis = TimeBasis::new(cfg.alpha, n, problem.transform.right())?;
    let space_basis = SpatialBasis::new(m, problem.dim)?;
    let sol = solve_spacetime_with(&problem, &time_basis, &space_basis, &cfg.options)?;

    let horizon = cfg.params.horizon;
    let points = space_grid(problem.dim);
    let values = sol.evaluate(&points, &[horizon])?;
    let exact = entry.exact_spacetime();
    let coords: &[&str] = if problem.dim == 1 { &["x"] } else { &["x", "y"] };
    let mut header = coords.to_vec();
    header.push("u_numeric");
    if exact.is_some() {
        header.extend(["u_exact", "abs_error"]);
    }
    let mut csv = Csv::new(&header);
    for (j, x) in points.iter().enumerate() {
        let u = values[(0, j)];
        let mut row: Vec<String> = x.iter().map(|&xi| real(xi)).collect();
        row.push(real(u));
        if let Some(f) = &exact {
            let e = f(x, horizon);
            row.extend([real(e), real((u - e).abs())]);
        }
        csv.row(&row);
    }

    let summary = match &exact {
        Some(f) => format!(
            "linf_error={:.6e} l2_error={:.6e} at s={horizon}",
            spacetime_error_linf(&sol, f.as_ref(), horizon)?,
            spacetime_error_l2(&sol, f.as_ref(), horizon)?
        ),
        None => "no reference solution".into(),
    };
    eprintln!("solve-pde: N={n} M={m} {summary} residual={:.3e}", sol.residual());
    Ok(csv)
}

/// Runs a study. Rows completed before a failing member are still returned
/// together with the error.
pub fn convergence(cfg: &RunConfig) -> (Csv, Result<(), CliError>) {
    let entry = cfg.entry;
    let spacetime = entry.is_spacetime();
    let mut csv = if spacetime {
        Csv::new(&["N", "M", "linf_error", "l2_error", "runtime_ms"])
    } else {
        Csv::new(&["N", "linf_error", "l2_error", "runtime_ms"])
    };
    let req = match study_request(cfg) {
        Ok(req) => req,
        Err(e) => return (csv, Err(e)),
    };
    let study = match run_convergence_study(entry, &req) {
        Ok(study) => study,
        Err(e) => return (csv, Err(e.into())),
    };
    for r in &study.reports {
        let mut row = vec![r.n_modes.to_string()];
        if let Some(m) = r.m_modes {
            row.push(m.to_string());
        }
        row.extend([real(r.linf_error), real(r.l2_error), real(r.runtime_ms)]);
        csv.row(&row);
    }
    if let Some(last) = study.last() {
        eprintln!(
            "convergence: {} rows, last N={}{} linf_error={:.6e} l2_error={:.6e}",
            study.reports.len(),
            last.n_modes,
            last.m_modes.map_or(String::new(), |m| format!(" M={m}")),
            last.linf_error,
            last.l2_error
        );
    }
    let outcome = match study.failure {
        None => Ok(()),
        Some(f) => {
            let at = match f.m_modes {
                Some(m) => format!("N={} M={m}", f.n_modes),
                None => format!("N={}", f.n_modes),
            };
            let msg = format!("study stopped at {at}: {}", f.error);
            Err(if f.error.is_numerical() { CliError::Numerical(msg) } else { usage(msg) })
        }
    };
    (csv, outcome)
}

fn study_request(cfg: &RunConfig) -> Result<StudyRequest, CliError> {
    let entry = cfg.entry;
    let mut req = StudyRequest::for_entry(entry);
    req.params = cfg.params;
    req.alpha = cfg.alpha;
    req.options = cfg.options;
    req.norm = cfg.norm;
    if let Some(ns) = &cfg.resolutions {
        req.resolutions = ns.clone();
    }
    if let Some(n_ref) = cfg.ref_n {
        if entry.is_spacetime() {
            return Err(usage("--ref-N applies to scalar problems only"));
        }
        req.reference = Reference::SelfConvergence { n_ref };
    }
    if entry.is_spacetime() {
        let default_m = entry.default_m.unwrap_or(20);
        let (ns, ms) = match (&cfg.resolutions, &cfg.space_resolutions) {
            (None, None) => (entry.study_n.to_vec(), entry.study_n.to_vec()),
            (Some(ns), None) => (ns.clone(), vec![default_m; ns.len()]),
            (None, Some(ms)) => (vec![entry.default_n; ms.len()], ms.clone()),
            (Some(ns), Some(ms)) => broadcast(ns, ms)?,
        };
        req.resolutions = ns;
        req.space_resolutions = Some(ms);
    } else if cfg.space_resolutions.is_some() {
        return Err(usage("--M only applies to space-time problems"));
    }
    Ok(req)
}

/// Pairs `N` and `M` lists, repeating a single value to the other list's length.
fn broadcast(ns: &[usize], ms: &[usize]) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    match (ns.len(), ms.len()) {
        (a, b) if a == b => Ok((ns.to_vec(), ms.to_vec())),
        (1, b) => Ok((vec![ns[0]; b], ms.to_vec())),
        (a, 1) => Ok((ns.to_vec(), vec![ms[0]; a])),
        _ => Err(usage("--N and --M lists must have equal length, or one must be a single value")),
    }
}
