mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_config_file, usage, CliError, RawOptions, RunConfig};

const GAMMA_GUIDE: &str = "\
Choosing gamma: the solver re-scales time by s = t^(1/gamma). When the
solution behaves like s^(p/q) near s = 0, gamma = 1/q turns it into the
polynomial t^p and the error drops to roundoff once N >= p. For sources
without a known singular exponent a small gamma such as 1/6 still restores
fast convergence. gamma = 1 is the classical, untransformed method.

Exit codes: 0 success, 2 invalid usage or parameters, 3 numerical failure.
Environment: FRACSPEC_THREADS caps the worker threads (0 = automatic).";

#[derive(Parser, Debug)]
#[command(
    name = "fracspec",
    version,
    about = "Spectral Galerkin solvers for time-fractional equations",
    after_help = GAMMA_GUIDE
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a scalar problem and write u on 1001 points of [0, T].
    #[command(after_help = GAMMA_GUIDE)]
    SolveOde(RunArgs),
    /// Solve the subdiffusion problem and write u on a 33x33 grid at s = T.
    #[command(after_help = GAMMA_GUIDE)]
    SolvePde(RunArgs),
    /// Run a convergence study and write one row per resolution.
    #[command(after_help = GAMMA_GUIDE)]
    Convergence(RunArgs),
    /// List the built-in problems and their defaults.
    ListProblems,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Problem id (see list-problems). Default: example1 for ODE commands, example4 for solve-pde.
    #[arg(long)]
    problem: Option<String>,
    /// Fractional order, 0 < delta < 1.
    #[arg(long)]
    delta: Option<String>,
    /// Time re-scaling exponent, "1" or "1/r" with an integer r >= 1.
    #[arg(long)]
    gamma: Option<String>,
    /// Reaction coefficient of the scalar problems (default 1).
    #[arg(long)]
    lambda: Option<String>,
    /// Final time T (default 2).
    #[arg(long = "T", value_name = "T")]
    horizon: Option<String>,
    /// Time modes: a value, a list "2,4,8" or a range "4:40:2".
    #[arg(long = "N", value_name = "N")]
    n: Option<String>,
    /// Spatial modes per direction, same forms as --N.
    #[arg(long = "M", value_name = "M")]
    m: Option<String>,
    /// Modes of the self-convergence reference solve (default 60 for example3).
    #[arg(long = "ref-N", value_name = "N")]
    ref_n: Option<String>,
    /// Extra quadrature points beyond N for the stiffness matrix (default 8).
    #[arg(long)]
    quad_guard: Option<String>,
    /// Basis parameter alpha > -1 (default 0); the discrete solution does not depend on it.
    #[arg(long)]
    alpha: Option<String>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<String>,
    /// File of key=value lines using the long flag names; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report the L2 error in the psi-weighted norm of the transformed variable.
    #[arg(long)]
    weighted_l2: bool,
}

impl RunArgs {
    fn into_raw(self) -> Result<RawOptions, CliError> {
        let flags = RawOptions {
            problem: self.problem,
            delta: self.delta,
            gamma: self.gamma,
            lambda: self.lambda,
            horizon: self.horizon,
            n: self.n,
            m: self.m,
            ref_n: self.ref_n,
            quad_guard: self.quad_guard,
            alpha: self.alpha,
            out: self.out,
            weighted_l2: self.weighted_l2,
        };
        match self.config {
            Some(path) => Ok(flags.or(parse_config_file(&path)?)),
            None => Ok(flags),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("FRACSPEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| usage(format!("FRACSPEC_THREADS must be a non-negative integer (got '{value}')")))?;
    #[cfg(feature = "parallel")]
    fracspec::par::init_thread_pool(threads);
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

#[derive(Clone, Copy)]
enum Task {
    SolveOde,
    SolvePde,
    Convergence,
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (args, task, default_problem) = match cli.command {
        Command::ListProblems => return commands::list_problems().emit(None),
        Command::SolveOde(a) => (a, Task::SolveOde, "example1"),
        Command::SolvePde(a) => (a, Task::SolvePde, "example4"),
        Command::Convergence(a) => (a, Task::Convergence, "example1"),
    };
    let cfg = RunConfig::from_raw(args.into_raw()?, default_problem)?;
    eprintln!("{}", cfg.header());
    let out = cfg.out.as_deref();
    match task {
        Task::SolveOde => commands::solve_ode(&cfg)?.emit(out),
        Task::SolvePde => commands::solve_pde(&cfg)?.emit(out),
        Task::Convergence => {
            let (csv, outcome) = commands::convergence(&cfg);
            csv.emit(out)?;
            outcome
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
