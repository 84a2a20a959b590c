use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use whitham_core::grid::{DEFAULT_L, DEFAULT_N};
use whitham_core::io::{csv_columns, format_number, profile_csv, to_json, Summary};
use whitham_core::kernel::{kernel_table, KernelEvaluator};
use whitham_core::sweep::{alpha_sweep, estimate_alpha0, log_spaced, BranchSummary, SweepMode, SweepRow, ThresholdEstimate};
use whitham_core::verify::{self, Suite, VerifyConfig};
use whitham_core::whitham::to_wave;
use whitham_core::{make_grid, solve_max, Error, OrliczParams, Scheme, SolverConfig};

mod input;
mod output;

use output::{Format, Sink};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    NotConverged(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::NotConverged(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        use Error::*;
        let msg = e.to_string();
        match e {
            NotPowerOfTwo(_)
            | GridTooSmall(_)
            | GridMismatch
            | LengthMismatch { .. }
            | NonFinite(_)
            | InvalidParameter(_)
            | SupportTooWide(_)
            | BracketNotStraddling { .. } => CliError::Usage(msg),
            _ => CliError::Failed(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

/// Solitary waves of the steady Whitham equation via Orlicz-constrained
/// maximization.
#[derive(Debug, Parser)]
#[command(name = "whitham", version)]
struct Cli {
    /// Which outputs to write.
    #[arg(long, value_enum, global = true, default_value = "both")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct GridArgs {
    /// Domain [-2^l, 2^l].
    #[arg(long, default_value_t = DEFAULT_L)]
    l: u32,
    /// Number of grid points (power of two).
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Spectral,
    Direct,
}

#[derive(Debug, Args, Clone, Copy)]
struct SolverArgs {
    /// EL residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "spectral")]
    scheme: SchemeArg,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            scheme: match self.scheme {
                SchemeArg::Spectral => Scheme::Spectral,
                SchemeArg::Direct => Scheme::Direct,
            },
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximize J at one alpha.
    Solve {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Start from a CSV profile (x, f) on the same grid.
        #[arg(long)]
        warm_start: Option<PathBuf>,
        /// Output stem; `.json` and `.csv` are appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve along a log-spaced list of alpha.
    Sweep {
        #[arg(long, default_value_t = 3.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 50.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// Solve every row from the initial guess, in parallel.
        #[arg(long)]
        cold: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the threshold alpha_0 by bisection.
    Threshold {
        #[arg(long, default_value_t = 0.5)]
        lo: f64,
        #[arg(long, default_value_t = 3.0)]
        hi: f64,
        /// Bracket width at which bisection stops.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// EL residual tolerance of each solve.
        #[arg(long, default_value_t = 1e-10)]
        solver_tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solitary wave from a maximizer.
    Wave {
        #[arg(long, required_unless_present = "from")]
        alpha: Option<f64>,
        /// Maximizer summary (.json) or profile (.csv) from `solve`.
        #[arg(long)]
        from: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Real-space kernels K_1/2 and K_1/4 on the grid.
    Kernel {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an invariant suite.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let format = cli.format;
    match cli.command {
        Command::Solve {
            alpha,
            grid,
            solver,
            warm_start,
            out,
        } => {
            let p = OrliczParams::new(positive("alpha", alpha)?)?;
            let g = make_grid(grid.l, grid.n)?;
            let cfg = solver.config()?;
            let warm = match warm_start {
                Some(path) => Some(input::read_profile(&path)?.on(&g)?),
                None => None,
            };
            let sink = Sink::new(out.as_deref(), &format!("solve_alpha{alpha}"), format);
            let r = solve_max(&p, &g, &cfg, warm.as_ref())?;
            let wave = to_wave(&r, &p).ok();
            let summary = Summary::new(&r, wave.as_ref());
            sink.emit(Some(&to_json(&summary)), Some(&profile_csv(&r.f, "f")))?;
            if !r.converged {
                return Err(CliError::NotConverged(format!(
                    "alpha = {alpha}: residual {:.3e} after {} iterations",
                    r.residual, r.iterations
                )));
            }
            Ok(())
        }
        Command::Sweep {
            alpha_min,
            alpha_max,
            steps,
            cold,
            grid,
            solver,
            out,
        } => {
            positive("alpha-min", alpha_min)?;
            positive("alpha-max", alpha_max)?;
            let alphas = log_spaced(alpha_min, alpha_max, steps)?;
            let g = make_grid(grid.l, grid.n)?;
            let cfg = solver.config()?;
            let mode = if cold { SweepMode::Cold } else { SweepMode::Warm };
            let sink = Sink::new(out.as_deref(), "sweep", format);
            let sweep = alpha_sweep(&alphas, &g, &cfg, mode)?;
            let report = SweepReport {
                l: grid.l,
                n: grid.n,
                tol: cfg.tol,
                mode,
                summary: sweep.summary(),
                rows: &sweep.rows,
            };
            sink.emit(Some(&to_json(&report)), Some(&sweep_csv(&sweep.rows)))?;
            let failed: Vec<String> = sweep
                .rows
                .iter()
                .filter(|r| !r.converged)
                .map(|r| r.alpha.to_string())
                .collect();
            if !failed.is_empty() {
                return Err(CliError::NotConverged(format!("rows not converged at alpha = {}", failed.join(", "))));
            }
            Ok(())
        }
        Command::Threshold {
            lo,
            hi,
            tol,
            grid,
            solver_tol,
            max_iter,
            out,
        } => {
            positive("lo", lo)?;
            positive("hi", hi)?;
            positive("tol", tol)?;
            let g = make_grid(grid.l, grid.n)?;
            let cfg = SolverConfig {
                tol: solver_tol,
                max_iter,
                ..SolverConfig::default()
            };
            cfg.validate()?;
            let sink = Sink::new(out.as_deref(), "threshold", format);
            let estimate = estimate_alpha0(lo, hi, tol, &g, &cfg)?;
            let report = ThresholdReport {
                l: grid.l,
                n: grid.n,
                tol,
                solver_tol,
                estimate: &estimate,
            };
            sink.emit(Some(&to_json(&report)), None)?;
            Ok(())
        }
        Command::Wave {
            alpha,
            from,
            grid,
            solver,
            out,
        } => {
            let cfg = solver.config()?;
            let (g, alpha, warm) = match &from {
                Some(path) => {
                    let (profile, alpha) = input::maximizer_source(path, alpha)?;
                    let g = profile.grid()?;
                    let f = profile.on(&g)?;
                    (g, alpha, Some(f))
                }
                None => {
                    let alpha = alpha.expect("clap requires alpha without --from");
                    (make_grid(grid.l, grid.n)?, alpha, None)
                }
            };
            let p = OrliczParams::new(positive("alpha", alpha)?)?;
            let sink = Sink::new(out.as_deref(), &format!("wave_alpha{alpha}"), format);
            let r = solve_max(&p, &g, &cfg, warm.as_ref())?;
            if !r.converged {
                return Err(CliError::NotConverged(format!(
                    "alpha = {alpha}: residual {:.3e} after {} iterations",
                    r.residual, r.iterations
                )));
            }
            let w = to_wave(&r, &p)?;
            let summary = Summary::new(&r, Some(&w));
            sink.emit(Some(&to_json(&summary)), Some(&profile_csv(&w.phi, "phi")))?;
            Ok(())
        }
        Command::Kernel { grid, out } => {
            let g = make_grid(grid.l, grid.n)?;
            let sink = Sink::new(out.as_deref(), "kernel", format);
            let half = kernel_table(&g, 0.5)?;
            let quarter = kernel_table(&g, 0.25)?;
            let o = half.singular_index();
            let mark = |v: &[f64]| {
                let mut v = v.to_vec();
                v[o] = f64::INFINITY;
                v
            };
            let (kh, kq) = (mark(half.values()), mark(quarter.values()));
            let csv = csv_columns(&["x", "K_half", "K_quarter"], &[g.nodes(), &kh, &kq])?;
            let report = KernelReport {
                l: grid.l,
                n: grid.n,
                mass_half: half.mass(),
                mass_quarter: quarter.mass(),
                c_half: half.c_a(),
                c_quarter: quarter.c_a(),
                remainder_at_origin_half: half.remainder_at_origin(),
                remainder_at_origin_quarter: quarter.remainder_at_origin(),
                l3_2_norm_half: KernelEvaluator::new(0.5)?.lp_norm(1.5)?,
            };
            sink.emit(Some(&to_json(&report)), Some(&csv))?;
            Ok(())
        }
        Command::Verify {
            suite,
            seed,
            grid,
            tol,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            let cfg = VerifyConfig {
                seed,
                l: grid.l,
                n: grid.n,
                solver: SolverConfig {
                    tol,
                    ..SolverConfig::default()
                },
            };
            cfg.solver.validate()?;
            make_grid(grid.l, grid.n)?;
            let reports = verify::run(suite, &cfg)?;
            let mut stdout = io::stdout().lock();
            for r in &reports {
                if write!(stdout, "{r}").is_err() {
                    break;
                }
            }
            let sink = Sink::new(out.as_deref(), &format!("verify_{suite}"), Format::Json);
            if sink.to_files() {
                sink.emit(Some(&to_json(&reports)), None)?;
            }
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.suite.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::Failed(format!("failing suites: {}", failed.join(", "))));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SweepReport<'a> {
    l: u32,
    n: usize,
    tol: f64,
    mode: SweepMode,
    summary: BranchSummary,
    rows: &'a [SweepRow],
}

#[derive(Serialize)]
struct ThresholdReport<'a> {
    l: u32,
    n: usize,
    tol: f64,
    solver_tol: f64,
    #[serde(flatten)]
    estimate: &'a ThresholdEstimate,
}

#[derive(Serialize)]
struct KernelReport {
    l: u32,
    n: usize,
    mass_half: f64,
    mass_quarter: f64,
    c_half: f64,
    c_quarter: f64,
    remainder_at_origin_half: f64,
    remainder_at_origin_quarter: f64,
    l3_2_norm_half: f64,
}

/// Columns `alpha,J,alphaJ2,peak_ratio,mu,converged`; `mu` is empty where the
/// maximizer is not physical.
fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("alpha,J,alphaJ2,peak_ratio,mu,converged\n");
    for r in rows {
        let mu = r.mu.map(format_number).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_number(r.alpha),
            format_number(r.j),
            format_number(r.alpha_j2),
            format_number(r.peak_ratio),
            mu,
            r.converged
        ));
    }
    out
}
