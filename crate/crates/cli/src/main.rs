//! `fraclim`: eigenvalues of the fractional p-Laplacian on an interval, the
//! s -> 1 sweeps and the inequality suites.
//!
//! Exit codes: 0 success, 1 a suite ran and failed, 2 invalid input or a
//! parameter outside the regime of an estimate, 3 a solver did not converge.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fraclim::constants::{kconst, KMethod};
use fraclim::solve::{
    dense_eigen_p2, first_eigen_fractional, second_eigen_fractional, EigenResult,
};
use fraclim::study::{emit_report, run_suite, run_sweep, Format, SuiteOptions, SUITES};
use fraclim::{Domain, FracError, Grid, Params, SolverConfig};

#[derive(Parser)]
#[command(name = "fraclim", version, about = "Fractional p-Laplacian eigenvalues and their limit as s -> 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Quadrature,
    ClosedForm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    /// Projected gradient on the L^p sphere (m = 1)
    Pg,
    /// Dense generalized eigenproblem (p = 2, any m)
    Dense,
    /// String method for the mountain-pass level (m = 2)
    String,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the limit constant K(p, N)
    Kconst {
        /// Integrability exponent p > 1
        #[arg(long)]
        p: f64,
        /// Space dimension N
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: Method,
    },
    /// Compute the m-th variational eigenvalue lambda^s_{m,p} of (a, b)
    Eig {
        /// Left end of the interval
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        /// Right end of the interval
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Interior grid nodes
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Fractional order s in (0, 1)
        #[arg(long)]
        s: f64,
        /// Integrability exponent p > 1
        #[arg(long)]
        p: f64,
        /// Mode index m (m > 2 needs p = 2)
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Solver; by default pg for m = 1, string for m = 2, dense otherwise
        #[arg(long, value_enum)]
        solver: Option<Solver>,
        #[command(flatten)]
        common: SolverArgs,
        /// Output file
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
    },
    /// Sweep s and compare (1 - s) lambda^s_{m,p} with K(p, 1) lambda^1_{m,p}
    Sweep {
        /// Integrability exponent p > 1
        #[arg(long)]
        p: f64,
        /// Mode index m in {1, 2}
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Increasing fractional orders s, comma separated
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        s_list: Vec<f64>,
        /// Interior grid nodes
        #[arg(long, default_value_t = 1024)]
        n: usize,
        /// Pairs t:q for the W^{t,q} distance of eigenfunctions (q >= p, t < p/q)
        #[arg(long, value_delimiter = ',')]
        tq: Vec<String>,
        /// Left end of the interval
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        /// Right end of the interval
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[command(flatten)]
        common: SolverArgs,
        /// Output file
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Run an inequality or limit suite; exit 0 iff it passes
    Check {
        /// One of: interpolation, poincare, hardy, sobolev, linfty, dual, bbm, cell, courant
        #[arg(long)]
        suite: String,
        /// Seed of the random test functions
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fractional order s, replacing the suite's list of s values
        #[arg(long)]
        s: Option<f64>,
        /// Integrability exponent p (default 2)
        #[arg(long)]
        p: Option<f64>,
        /// Interior grid nodes
        #[arg(long)]
        n: Option<usize>,
        /// Random test functions per case
        #[arg(long)]
        samples: Option<usize>,
        /// Output file
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
    },
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Relative change of the Rayleigh quotient at which iterations stop
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Images on the string from u_1 to -u_1
    #[arg(long, default_value_t = 33)]
    path_points: usize,
    /// Gauss points per direction in the seminorm quadrature
    #[arg(long, default_value_t = 4)]
    quad_order: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            path_points: self.path_points,
            ..SolverConfig::default()
        };
        cfg.seminorm.quad_order = self.quad_order;
        cfg
    }
}

enum Failure {
    Lib(FracError),
    Usage(String),
    SuiteFailed(String),
    RowsFailed(Vec<String>),
}

impl From<FracError> for Failure {
    fn from(e: FracError) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &FracError) -> u8 {
    match e {
        FracError::Convergence { .. } | FracError::DegeneratePath(_) | FracError::Assembly(_) => 3,
        _ => 2,
    }
}

/// 12 significant digits in positional notation.
fn twelve_digits(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.11}");
    }
    let mag = x.abs().log10().floor() as i32;
    let prec = (11 - mag).max(0) as usize;
    format!("{x:.prec$}")
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|source| {
        Failure::Lib(FracError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn eigen_output(r: &EigenResult<f64>, format: OutFormat) -> String {
    match format {
        OutFormat::Json => r.to_json(),
        OutFormat::Csv => r.eigenfunction.to_csv(),
    }
}

fn parse_tq(items: &[String]) -> Result<Vec<(f64, f64)>, Failure> {
    items
        .iter()
        .map(|item| {
            let bad = || Failure::Usage(format!("--tq expects t:q pairs, got {item:?}"));
            let (t, q) = item.split_once(':').ok_or_else(bad)?;
            Ok((t.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Kconst { p, dim, method } => {
            let method = match method {
                Method::Quadrature => KMethod::Quadrature,
                Method::ClosedForm => KMethod::ClosedForm,
            };
            let k: f64 = kconst(p, dim, method)?;
            println!("{}", twelve_digits(k));
        }
        Command::Eig {
            a,
            b,
            n,
            s,
            p,
            m,
            solver,
            common,
            out,
            format,
        } => {
            let cfg = common.config();
            let fp = Params::one_d(s, p)?;
            let grid = Grid::new(Domain::new(a, b)?, n);
            if m == 0 {
                return Err(Failure::Usage("m must be at least 1".into()));
            }
            if m > 2 && p != 2.0 {
                return Err(Failure::Usage("m>2 requires p=2".into()));
            }
            let solver = solver.unwrap_or(match m {
                1 => Solver::Pg,
                2 => Solver::String,
                _ => Solver::Dense,
            });
            let result = match solver {
                Solver::Dense => {
                    if p != 2.0 {
                        return Err(Failure::Usage("the dense solver requires p=2".into()));
                    }
                    dense_eigen_p2(&grid, fp, m, cfg.seminorm)?.swap_remove(m - 1)
                }
                Solver::Pg => {
                    if m != 1 {
                        return Err(Failure::Usage("the pg solver computes m=1 only".into()));
                    }
                    first_eigen_fractional(&grid, fp, &cfg)?
                }
                Solver::String => {
                    if m != 2 {
                        return Err(Failure::Usage("the string solver computes m=2 only".into()));
                    }
                    let u1 = first_eigen_fractional(&grid, fp, &cfg)?;
                    second_eigen_fractional(&grid, fp, &u1, &cfg)?
                }
            };
            println!("{}", twelve_digits(result.lambda));
            if let Some(path) = out {
                write_text(&path, &eigen_output(&result, format))?;
            }
        }
        Command::Sweep {
            p,
            m,
            s_list,
            n,
            tq,
            a,
            b,
            common,
            out,
            format,
        } => {
            let cfg = common.config();
            let tq = parse_tq(&tq)?;
            let report = run_sweep(Domain::new(a, b)?, p, m, &s_list, n, &tq, &cfg)?;
            emit_report(&report, &out, format.into())?;
            let failed: Vec<String> = report
                .rows
                .iter()
                .filter(|r| !r.ok())
                .map(|r| format!("s={}: {}", r.s, r.status))
                .collect();
            for row in &report.rows {
                println!(
                    "s={} scaled_lambda={} rel_err={:.3e} {}",
                    row.s,
                    twelve_digits(row.scaled_lambda),
                    row.rel_err,
                    row.status
                );
            }
            if !failed.is_empty() {
                return Err(Failure::RowsFailed(failed));
            }
        }
        Command::Check {
            suite,
            seed,
            s,
            p,
            n,
            samples,
            out,
            format,
        } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown suite {suite:?}; expected one of {}",
                    SUITES.join(", ")
                )));
            }
            let opts = SuiteOptions { s, p, n, samples };
            let report = run_suite(&suite, seed, opts, &SolverConfig::default())?;
            if let Some(path) = out {
                emit_report(&report, &path, format.into())?;
            }
            let verdict = if report.passed { "pass" } else { "FAIL" };
            println!(
                "{suite}: {verdict} ({} of {} cases)",
                report.rows.len() - report.failures(),
                report.rows.len()
            );
            if !report.passed {
                return Err(Failure::SuiteFailed(suite));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("FRACLIM_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global()
                    .expect("thread pool is configured once");
            }
            _ => {
                eprintln!("error: FRACLIM_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::RowsFailed(rows)) => {
            for r in &rows {
                eprintln!("error: {r}");
            }
            ExitCode::from(3)
        }
        Err(Failure::SuiteFailed(suite)) => {
            eprintln!("suite {suite} failed");
            ExitCode::from(1)
        }
    }
}
