mod commands;
mod config;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::{Common, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Hermite expansions for the value distribution of L-functions near the
/// critical line, with Monte Carlo and zeta cross-checks.
///
/// Numbers are written with 17 significant digits. CSV outputs start with a
/// `# config: {...}` line holding the resolved settings as JSON.
///
/// Exit status: 0 success, 2 invalid input, 3 failed numerical check,
/// 4 truncation gate failure.
#[derive(Parser)]
#[command(name = "randeuler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the coefficient table b_{k,l} and write it as JSON.
    ///
    /// A summary (residues, envelope fit, settings) goes to --report or stderr.
    Coeffs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Rectangle probabilities.
    ///
    /// CSV columns: rectangle,expansion,gaussian_leading,tail_bound.
    Prob {
        #[command(flatten)]
        common: Common,
        /// Use a saved table instead of building one.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Density on a grid of one component, in unnormalized (log|L|, arg L).
    ///
    /// CSV columns: u,v,density.
    DensityGrid {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        component: usize,
        /// `lo,hi` for u (default ±3√ψ).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        u: Option<(f64, f64)>,
        /// `lo,hi` for v (default ±3√ψ).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        v: Option<(f64, f64)>,
        #[arg(long, default_value_t = 61)]
        nu: usize,
        #[arg(long, default_value_t = 61)]
        nv: usize,
    },
    /// Sample the random Euler product.
    ///
    /// CSV columns: log_abs_1,arg_1,...; a `.bin` output path selects the
    /// binary layout. A summary goes to stderr.
    Mc {
        #[command(flatten)]
        common: Common,
    },
    /// Expansion against Monte Carlo on rectangles.
    ///
    /// CSV columns: rectangle,expansion,mc,stderr,abs_diff,verdict. A row
    /// passes when abs_diff <= max(4 stderr, 0.02).
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Refuse when the Monte Carlo truncation sd exceeds this multiple of √ψ.
        #[arg(long, default_value_t = 0.02)]
        gate_fraction: f64,
    },
    /// Sample log ζ(σ_T + it) at random t in [T, 2T].
    ///
    /// CSV columns: t,log_abs,arg,flags. A summary goes to stderr.
    Zeta {
        #[command(flatten)]
        common: Common,
        #[arg(long = "T", default_value_t = 1e6)]
        t: f64,
    },
    /// Quick end-to-end checks at small sizes.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(format!("empty range {a},{b}"));
    }
    Ok((a, b))
}

/// A failed numerical check reported by the front end itself.
#[derive(Debug)]
pub struct Failed(pub String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Failed>().is_some() {
        return 3;
    }
    match e.downcast_ref::<randeuler::Error>() {
        Some(randeuler::Error::Gate { .. }) => 4,
        Some(err) if err.is_numerical() => 3,
        _ => 2,
    }
}

fn run(command: Command) -> Result<()> {
    use commands as c;
    match command {
        Command::Coeffs { common, report } => {
            let mut cfg = RunConfig::resolve("coeffs", &common, 0)?;
            threads(cfg.threads, || c::coeffs(&mut cfg, report.as_deref()))
        }
        Command::Prob { common, table } => {
            let mut cfg = RunConfig::resolve("prob", &common, 0)?;
            threads(cfg.threads, || c::prob(&mut cfg, table.as_deref()))
        }
        Command::DensityGrid {
            common,
            table,
            component,
            u,
            v,
            nu,
            nv,
        } => {
            let mut cfg = RunConfig::resolve("density-grid", &common, 0)?;
            threads(cfg.threads, || {
                c::density(&mut cfg, table.as_deref(), component, u, v, (nu, nv))
            })
        }
        Command::Mc { common } => {
            let mut cfg = RunConfig::resolve("mc", &common, 100_000)?;
            threads(cfg.threads, || c::mc(&mut cfg))
        }
        Command::Compare {
            common,
            table,
            gate_fraction,
        } => {
            let mut cfg = RunConfig::resolve("compare", &common, 100_000)?;
            threads(cfg.threads, || {
                c::compare(&mut cfg, table.as_deref(), gate_fraction)
            })
        }
        Command::Zeta { common, t } => {
            let cfg = RunConfig::resolve("zeta", &common, 10_000)?;
            threads(cfg.threads, || c::zeta(&cfg, t))
        }
        Command::Selftest { common } => {
            let cfg = RunConfig::resolve("selftest", &common, 20_000)?;
            threads(cfg.threads, || c::selftest(&cfg))
        }
    }
}

fn threads(n: usize, op: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    randeuler::parallel::with_threads(n, op)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
