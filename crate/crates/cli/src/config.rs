//! Resolution of flags and the optional JSON config file into one
//! [`RunConfig`]. Flags win over the file, the file wins over defaults.

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use randeuler::{CoeffTable, ExpansionConfig, PrimeTail, Rectangle, SigmaMode};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaArg {
    SigmaT,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailArg {
    Truncate,
    Complete,
}

/// Settings shared by every subcommand. Each is optional so that a value
/// from `--config` can fill it in.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Common {
    /// JSON file with any of these settings (kebab-case keys); flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// `zeta`, `chi3,chi4`, or spec file paths, comma separated.
    #[arg(long)]
    pub spec: Option<String>,

    #[arg(long)]
    pub theta: Option<f64>,

    /// log T.
    #[arg(long = "log-t")]
    pub log_t: Option<f64>,

    /// Total-degree cutoff N.
    #[arg(long = "cutoff", short = 'N')]
    pub cutoff: Option<usize>,

    /// Prime cutoff of the expansion sums.
    #[arg(long = "p-max")]
    pub p_max: Option<u64>,

    /// Tail tolerance of the local factors.
    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long = "sigma-mode", value_enum)]
    pub sigma_mode: Option<SigmaArg>,

    #[arg(long = "prime-tail", value_enum)]
    pub prime_tail: Option<TailArg>,

    #[arg(long)]
    pub delta1: Option<f64>,

    #[arg(long)]
    pub delta2: Option<f64>,

    /// Rectangle `a,b,c,d` per component, components joined by `;`, in
    /// normalized units. Repeatable.
    #[arg(long = "rect", allow_hyphen_values = true)]
    pub rect: Vec<String>,

    /// File with one rectangle per line (`#` starts a comment).
    #[arg(long = "rects")]
    pub rects: Option<PathBuf>,

    /// Prime cutoff of the Monte Carlo product (defaults to --p-max).
    #[arg(long = "p-mc")]
    pub p_mc: Option<u64>,

    /// Number of Monte Carlo draws or zeta heights.
    #[arg(long, short = 'n')]
    pub n: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output file (stdout when absent).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

/// The fully resolved settings, embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub spec: String,
    pub theta: f64,
    pub log_t: f64,
    pub expansion: ExpansionConfig,
    pub rects: Vec<String>,
    /// Filled from the table's `P_max` when not given.
    pub p_mc: Option<u64>,
    pub n: usize,
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(subcommand: &str, flags: &Common, default_n: usize) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => load_file(path)?,
            None => Common::default(),
        };
        let (f, g) = (flags.clone(), file);
        let base = ExpansionConfig::default();
        let expansion = ExpansionConfig {
            cutoff: f.cutoff.or(g.cutoff).unwrap_or(base.cutoff),
            p_max: f.p_max.or(g.p_max).unwrap_or(base.p_max),
            tol: f.tol.or(g.tol).unwrap_or(base.tol),
            sigma_mode: match f.sigma_mode.or(g.sigma_mode) {
                Some(SigmaArg::Half) => SigmaMode::Half,
                Some(SigmaArg::SigmaT) | None => SigmaMode::SigmaT,
            },
            prime_tail: match f.prime_tail.or(g.prime_tail) {
                Some(TailArg::Complete) => PrimeTail::Complete,
                Some(TailArg::Truncate) | None => PrimeTail::Truncate,
            },
            delta1: f.delta1.or(g.delta1).unwrap_or(base.delta1),
            delta2: f.delta2.or(g.delta2).unwrap_or(base.delta2),
            ..base
        };
        expansion.validate()?;
        let mut rects = if f.rect.is_empty() && f.rects.is_none() {
            g.rect
        } else {
            f.rect
        };
        if let Some(path) = f.rects.or(g.rects) {
            rects.extend(read_rect_file(&path)?);
        }
        let cfg = Self {
            subcommand: subcommand.to_string(),
            spec: f.spec.or(g.spec).unwrap_or_else(|| "zeta".into()),
            theta: f.theta.or(g.theta).unwrap_or(0.4),
            log_t: f.log_t.or(g.log_t).unwrap_or(1e4),
            p_mc: f.p_mc.or(g.p_mc),
            expansion,
            rects,
            n: f.n.or(g.n).unwrap_or(default_n),
            seed: f.seed.or(g.seed).unwrap_or(1),
            threads: f.threads.or(g.threads).unwrap_or(0),
            out: f.out.or(g.out),
        };
        if !(cfg.theta > 0.0 && cfg.theta < 0.5) {
            bail!(randeuler::Error::InvalidParameter(format!(
                "theta must lie in (0, 1/2), got {}",
                cfg.theta
            )));
        }
        for r in &cfg.rects {
            Rectangle::parse(r)?;
        }
        Ok(cfg)
    }

    /// Takes the expansion settings from a loaded or freshly built table.
    pub fn adopt(&mut self, t: &CoeffTable) {
        self.spec = t.spec.clone();
        self.theta = t.theta;
        self.log_t = t.log_t;
        self.expansion = t.config.clone();
        self.p_mc.get_or_insert(t.config.p_max);
    }

    pub fn p_mc(&self) -> u64 {
        self.p_mc.unwrap_or(self.expansion.p_max)
    }

    pub fn rectangles(&self) -> Result<Vec<Rectangle>> {
        Ok(self
            .rects
            .iter()
            .map(|r| Rectangle::parse(r))
            .collect::<randeuler::Result<_>>()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

fn load_file(path: &Path) -> Result<Common> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| randeuler::Error::InvalidParameter(format!("{}: {e}", path.display())).into())
}

fn read_rect_file(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}
