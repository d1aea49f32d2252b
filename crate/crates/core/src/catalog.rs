//! Reference problems with their default parameters.
//!
//! All problems live on `s ∈ [0, 2]`. The reaction coefficient `λ` of the
//! scalar problems defaults to 1.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frac_ops::{FracOrder, TransformSpec};
use crate::ode::{PowerTerm, ScalarFn, TimeProblem, TimeRhs};
use crate::pde::SpaceTimeProblem;

/// Source of truth for error measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Closed-form solution.
    Exact,
    /// High-resolution solve with `n_ref` modes.
    SelfConvergence { n_ref: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `D^δ u + λ u = g` with exact solution `u = s^σ`.
    ScalarPower,
    /// `D^δ u + λ u = sin s`.
    ScalarSine,
    /// `D^δ u = Δu - u + g` with `u = Π sin(π x_i) s^σ`.
    Subdiffusion { dim: usize },
}

/// A catalog problem and its defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub kind: ProblemKind,
    pub delta: f64,
    /// `γ = 1/r`.
    pub r: u32,
    pub lambda: f64,
    pub horizon: f64,
    pub sigma: Option<f64>,
    pub reference: Reference,
    pub default_n: usize,
    pub default_m: Option<usize>,
    /// Default resolutions for convergence studies.
    pub study_n: &'static [usize],
}

/// Parameters of one run; start from [`CatalogEntry::params`] and override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub delta: f64,
    pub r: u32,
    pub lambda: f64,
    pub horizon: f64,
}

impl Params {
    pub fn order(&self) -> Result<FracOrder> {
        FracOrder::new(self.delta)
    }

    pub fn transform(&self) -> Result<TransformSpec> {
        TransformSpec::new(self.r, self.horizon)
    }
}

const EVEN_4_40: &[usize] = &[4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30, 32, 34, 36, 38, 40];
const EVEN_4_30: &[usize] = &[4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30];

static ENTRIES: [CatalogEntry; 5] = [
    CatalogEntry {
        id: "example1",
        summary: "u = s^2, smooth solution, classical basis",
        kind: ProblemKind::ScalarPower,
        delta: 0.5,
        r: 1,
        lambda: 1.0,
        horizon: 2.0,
        sigma: Some(2.0),
        reference: Reference::Exact,
        default_n: 4,
        default_m: None,
        study_n: &[2, 4],
    },
    CatalogEntry {
        id: "example2a",
        summary: "u = s^(3/5), rational power made polynomial by gamma = 1/5",
        kind: ProblemKind::ScalarPower,
        delta: 0.2,
        r: 5,
        lambda: 1.0,
        horizon: 2.0,
        sigma: Some(0.6),
        reference: Reference::Exact,
        default_n: 8,
        default_m: None,
        study_n: &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20],
    },
    CatalogEntry {
        id: "example2b",
        summary: "u = s^(sqrt(2)/2), irrational power, gamma = 1/7",
        kind: ProblemKind::ScalarPower,
        delta: 0.2,
        r: 7,
        lambda: 1.0,
        horizon: 2.0,
        sigma: Some(FRAC_1_SQRT_2),
        reference: Reference::Exact,
        default_n: 20,
        default_m: None,
        study_n: EVEN_4_40,
    },
    CatalogEntry {
        id: "example3",
        summary: "g = sin s, no closed-form solution, self-convergence reference",
        kind: ProblemKind::ScalarSine,
        delta: 0.5,
        r: 6,
        lambda: 1.0,
        horizon: 2.0,
        sigma: None,
        reference: Reference::SelfConvergence { n_ref: 60 },
        default_n: 30,
        default_m: None,
        study_n: EVEN_4_30,
    },
    CatalogEntry {
        id: "example4",
        summary: "2D subdiffusion, u = sin(pi x) sin(pi y) s^(3/5)",
        kind: ProblemKind::Subdiffusion { dim: 2 },
        delta: 0.5,
        r: 5,
        lambda: 1.0,
        horizon: 2.0,
        sigma: Some(0.6),
        reference: Reference::Exact,
        default_n: 20,
        default_m: Some(20),
        study_n: &[4, 6, 8, 10, 12, 14, 16, 18, 20],
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn lookup(id: &str) -> Result<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.id == id).ok_or_else(|| {
        let known: Vec<&str> = ENTRIES.iter().map(|e| e.id).collect();
        Error::invalid(format!("unknown problem '{id}' (known: {})", known.join(", ")))
    })
}

impl CatalogEntry {
    pub fn params(&self) -> Params {
        Params {
            delta: self.delta,
            r: self.r,
            lambda: self.lambda,
            horizon: self.horizon,
        }
    }

    pub fn is_spacetime(&self) -> bool {
        matches!(self.kind, ProblemKind::Subdiffusion { .. })
    }

    pub fn has_exact(&self) -> bool {
        self.reference == Reference::Exact
    }

    pub fn time_problem(&self, params: &Params) -> Result<TimeProblem> {
        let delta = params.order()?;
        let transform = params.transform()?;
        match (self.kind, self.sigma) {
            (ProblemKind::ScalarPower, Some(sigma)) => {
                TimeProblem::manufactured(delta, params.lambda, transform, &[PowerTerm::new(1.0, sigma)])
            }
            (ProblemKind::ScalarSine, _) => {
                TimeProblem::new(delta, params.lambda, transform, TimeRhs::function(f64::sin))
            }
            _ => Err(Error::invalid(format!("{} is not a scalar problem", self.id))),
        }
    }

    /// Exact `u(s)` of a scalar problem, if known.
    pub fn exact_time(&self) -> Option<ScalarFn> {
        match (self.kind, self.sigma) {
            (ProblemKind::ScalarPower, Some(sigma)) => Some(Arc::new(move |s: f64| s.powf(sigma))),
            _ => None,
        }
    }

    pub fn spacetime_problem(&self, params: &Params) -> Result<SpaceTimeProblem> {
        match (self.kind, self.sigma) {
            (ProblemKind::Subdiffusion { dim }, Some(sigma)) => {
                SpaceTimeProblem::manufactured_sine_power(params.order()?, params.transform()?, dim, sigma)
            }
            _ => Err(Error::invalid(format!("{} is not a space-time problem", self.id))),
        }
    }

    /// Exact `u(x, s)` of a space-time problem.
    pub fn exact_spacetime(&self) -> Option<Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>> {
        match (self.kind, self.sigma) {
            (ProblemKind::Subdiffusion { .. }, Some(sigma)) => Some(Arc::new(move |x: &[f64], s: f64| {
                x.iter().map(|&xi| (PI * xi).sin()).product::<f64>() * s.powf(sigma)
            })),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_resolvable() {
        for e in entries() {
            assert_eq!(lookup(e.id).unwrap(), e);
            assert_eq!(e.horizon, 2.0);
            assert!(e.study_n.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(lookup("example9").is_err());
    }

    #[test]
    fn problems_build() {
        for e in entries() {
            let p = e.params();
            if e.is_spacetime() {
                assert!(e.spacetime_problem(&p).is_ok());
                assert!(e.time_problem(&p).is_err());
            } else {
                assert!(e.time_problem(&p).is_ok());
                assert_eq!(e.exact_time().is_some(), e.has_exact());
            }
        }
    }
}
