//! Run configuration: flags merged over an optional `key=value` file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use fracspec::analysis::L2Norm;
use fracspec::catalog::{lookup, CatalogEntry, Params};
use fracspec::ode::{AssemblyOptions, DEFAULT_QUAD_GUARD};

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, values or files: exit 2.
    Usage(String),
    /// The solver failed on valid input: exit 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Numerical(msg) => f.write_str(msg),
        }
    }
}

impl From<fracspec::Error> for CliError {
    fn from(e: fracspec::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Raw option values before validation; `None` means "use the default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawOptions {
    pub problem: Option<String>,
    pub delta: Option<String>,
    pub gamma: Option<String>,
    pub lambda: Option<String>,
    pub horizon: Option<String>,
    pub n: Option<String>,
    pub m: Option<String>,
    pub ref_n: Option<String>,
    pub quad_guard: Option<String>,
    pub alpha: Option<String>,
    pub out: Option<String>,
    pub weighted_l2: bool,
}

impl RawOptions {
    /// Fills every unset field from `base`; set fields win.
    pub fn or(self, base: RawOptions) -> RawOptions {
        RawOptions {
            problem: self.problem.or(base.problem),
            delta: self.delta.or(base.delta),
            gamma: self.gamma.or(base.gamma),
            lambda: self.lambda.or(base.lambda),
            horizon: self.horizon.or(base.horizon),
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            ref_n: self.ref_n.or(base.ref_n),
            quad_guard: self.quad_guard.or(base.quad_guard),
            alpha: self.alpha.or(base.alpha),
            out: self.out.or(base.out),
            weighted_l2: self.weighted_l2 || base.weighted_l2,
        }
    }
}

/// Parses a config file of `key=value` lines; `#` starts a comment.
/// Keys are the long flag names without dashes.
pub fn parse_config_file(path: &Path) -> Result<RawOptions, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn parse_config(text: &str) -> Result<RawOptions, String> {
    let mut raw = RawOptions::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim().to_string());
        let slot = match key {
            "problem" => &mut raw.problem,
            "delta" => &mut raw.delta,
            "gamma" => &mut raw.gamma,
            "lambda" => &mut raw.lambda,
            "T" => &mut raw.horizon,
            "N" => &mut raw.n,
            "M" => &mut raw.m,
            "ref-N" => &mut raw.ref_n,
            "quad-guard" => &mut raw.quad_guard,
            "alpha" => &mut raw.alpha,
            "out" => &mut raw.out,
            "weighted-l2" => {
                raw.weighted_l2 = parse_bool(&value).ok_or_else(|| format!("line {}: weighted-l2 expects true or false", lineno + 1))?;
                continue;
            }
            other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
        };
        *slot = Some(value);
    }
    Ok(raw)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// `"1"` or `"1/r"` with integer `r >= 1`; returns `r`.
pub fn parse_gamma(s: &str) -> Result<u32, CliError> {
    let bad = || usage(format!("gamma must be 1 or 1/r with an integer r >= 1 (got '{s}')"));
    let s = s.trim();
    if s == "1" {
        return Ok(1);
    }
    let (num, den) = s.split_once('/').ok_or_else(bad)?;
    if num.trim() != "1" {
        return Err(bad());
    }
    match den.trim().parse::<u32>() {
        Ok(r) if r >= 1 => Ok(r),
        _ => Err(bad()),
    }
}

/// A single value, a comma list, or a range `a:b[:step]` (inclusive).
pub fn parse_resolutions(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = |what: &str| usage(format!("invalid resolution list '{s}': {what}"));
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad("expected positive integers"));
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > 3 {
            return Err(bad("a range is a:b or a:b:step"));
        }
        let (a, b) = (parse(parts[0])?, parse(parts[1])?);
        let step = if parts.len() == 3 { parse(parts[2])? } else { 1 };
        if step == 0 || a > b {
            return Err(bad("a range needs a <= b and a positive step"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad("resolutions must be positive"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("resolutions must be strictly increasing"));
    }
    Ok(values)
}

fn parse_num<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{name} expects a number (got '{s}')")))
}

/// Validated configuration shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub entry: &'static CatalogEntry,
    pub params: Params,
    pub resolutions: Option<Vec<usize>>,
    pub space_resolutions: Option<Vec<usize>>,
    pub ref_n: Option<usize>,
    pub alpha: f64,
    pub options: AssemblyOptions,
    pub out: Option<PathBuf>,
    pub norm: L2Norm,
}

impl RunConfig {
    pub fn from_raw(raw: RawOptions, default_problem: &str) -> Result<Self, CliError> {
        let entry = lookup(raw.problem.as_deref().unwrap_or(default_problem))?;
        let mut params = entry.params();
        if let Some(d) = &raw.delta {
            params.delta = parse_num("delta", d)?;
        }
        if !(params.delta > 0.0 && params.delta < 1.0) {
            return Err(usage(format!("delta must lie in (0,1) (got {})", params.delta)));
        }
        if let Some(g) = &raw.gamma {
            params.r = parse_gamma(g)?;
        }
        if let Some(l) = &raw.lambda {
            params.lambda = parse_num("lambda", l)?;
            if entry.is_spacetime() {
                return Err(usage("lambda is fixed to 1 by the space-time problem"));
            }
        }
        if !(params.lambda > 0.0 && params.lambda.is_finite()) {
            return Err(usage(format!("lambda must be positive (got {})", params.lambda)));
        }
        if let Some(t) = &raw.horizon {
            params.horizon = parse_num("T", t)?;
        }
        if !(params.horizon > 0.0 && params.horizon.is_finite()) {
            return Err(usage(format!("T must be positive (got {})", params.horizon)));
        }
        let mut options = AssemblyOptions::default();
        if let Some(q) = &raw.quad_guard {
            options.quad_guard = parse_num("quad-guard", q)?;
        }
        let alpha = match &raw.alpha {
            Some(a) => parse_num("alpha", a)?,
            None => 0.0,
        };
        let ref_n = raw.ref_n.as_deref().map(|r| parse_num::<usize>("ref-N", r)).transpose()?;
        Ok(Self {
            entry,
            params,
            resolutions: raw.n.as_deref().map(parse_resolutions).transpose()?,
            space_resolutions: raw.m.as_deref().map(parse_resolutions).transpose()?,
            ref_n,
            alpha,
            options,
            out: raw.out.map(PathBuf::from),
            norm: if raw.weighted_l2 { L2Norm::PsiWeighted } else { L2Norm::Physical },
        })
    }

    /// The single resolution of a solve command, or `default`.
    pub fn single(list: &Option<Vec<usize>>, flag: &str, default: usize) -> Result<usize, CliError> {
        match list.as_deref() {
            None => Ok(default),
            Some([n]) => Ok(*n),
            Some(_) => Err(usage(format!("--{flag} takes a single value for this command"))),
        }
    }

    /// One-line description of every setting, printed before a run.
    pub fn header(&self) -> String {
        let gamma = if self.params.r == 1 { "1".to_string() } else { format!("1/{}", self.params.r) };
        format!(
            "problem={} delta={} gamma={gamma} lambda={} T={} alpha={} quad_guard={} (default {DEFAULT_QUAD_GUARD}) l2={}",
            self.entry.id,
            self.params.delta,
            self.params.lambda,
            self.params.horizon,
            self.alpha,
            self.options.quad_guard,
            match self.norm {
                L2Norm::PsiWeighted => "psi-weighted",
                _ => "physical",
            }
        )
    }
}
