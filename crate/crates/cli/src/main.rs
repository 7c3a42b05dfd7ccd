//! `dioph`: exact solution counts, sweeps, Hua moments and exponent reports.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 cross-check
//! failure, 3 budget refusal.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dioph_core::{Budget, Exec};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(String),
}

impl From<dioph_core::Error> for CliError {
    fn from(e: dioph_core::Error) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "dioph",
    version,
    about = "Exact solution counting for c1*x1^k1 + ... + cs*xs^ks = n"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Search-tree node budget for enumeration counters.
    #[arg(long, global = true, default_value_t = Budget::default().nodes)]
    pub budget_nodes: u64,
    /// Memory budget in bytes for coefficient tables and histograms.
    #[arg(long, global = true, default_value_t = Budget::default().memory_bytes)]
    pub budget_mem: u64,
    /// Quadrature sample budget (samples times factors).
    #[arg(long, global = true, default_value_t = Budget::default().samples)]
    pub budget_samples: u64,
    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl GlobalOpts {
    pub fn budget(&self) -> Budget {
        Budget {
            nodes: self.budget_nodes,
            memory_bytes: self.budget_mem,
            samples: self.budget_samples,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count solutions of one equation, cross-checking methods.
    Count(commands::CountArgs),
    /// Run a sweep campaign from a JSON config.
    Sweep(commands::SweepArgs),
    /// Hua moments by histogram and quadrature, with a growth fit.
    Hua(commands::HuaArgs),
    /// Bound exponents for a list of exponents k_1, ..., k_s.
    Exponents(commands::ExponentsArgs),
    /// Gamma function self-checks and the main-term inequality.
    GammaCheck,
    /// Self-check report: worked examples, exponent identities, diagnostics.
    Report,
}

/// Sets up the thread pool and returns the execution policy and the
/// effective degree of parallelism.
fn configure_threads(requested: Option<usize>) -> Result<(Exec, usize), CliError> {
    match requested {
        Some(0) => Err(CliError::Usage("--parallel must be ≥ 1".into())),
        Some(1) => Ok((Exec::Sequential, 1)),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            Ok((Exec::Parallel, n))
        }
        #[cfg(feature = "parallel")]
        None => Ok((Exec::Parallel, rayon::current_num_threads())),
        #[cfg(not(feature = "parallel"))]
        _ => Ok((Exec::Sequential, 1)),
    }
}

pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let requested = match &cli.command {
        Command::Sweep(args) => cli
            .global
            .parallel
            .or_else(|| commands::sweep_parallelism(args)),
        _ => cli.global.parallel,
    };
    let (exec, threads) = configure_threads(requested)?;
    let g = &cli.global;
    match cli.command {
        Command::Count(args) => commands::count(&args, g, exec, threads),
        Command::Sweep(args) => commands::sweep(&args, g, exec, threads),
        Command::Hua(args) => commands::hua(&args, g, exec, threads),
        Command::Exponents(args) => commands::exponents(&args, g, threads),
        Command::GammaCheck => commands::gamma_check(g, threads),
        Command::Report => commands::self_report(g, exec, threads),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out_path = cli.global.out.clone();
    match run(cli) {
        Ok(output) => {
            let written = match &out_path {
                Some(p) => std::fs::write(p, &output.text),
                None => std::io::stdout().write_all(output.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if output.failed { 2 } else { 0 })
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("budget refusal: {msg}");
            ExitCode::from(3)
        }
    }
}
