use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paradoxlens_core::diagnostics::{DEFAULT_ALPHA, DEFAULT_MIN_N};
use paradoxlens_core::simulate::Noise;
use paradoxlens_core::{BinningSpec, ColumnMap};

pub const DEFAULT_SEED: u64 = 42;
/// Bins used for diagnostic strata when no binning flag is given.
pub const DEFAULT_DIAGNOSTIC_BINS: usize = 4;

#[derive(Debug, Parser)]
#[command(
    name = "paradoxlens",
    version,
    about = "Compare two groups' pre/post measurements with and without baseline adjustment",
    after_help = "\
Exit codes: 0 success, 1 I/O or input error, 2 usage error, 3 no common support, 4 diagnostics violation.

Examples:
  paradoxlens simulate --preset lord-null --seed 7 -o data.csv
  paradoxlens analyze data.csv --format json -o report.json
  paradoxlens plot data.csv -o figure.svg
  paradoxlens diagnose data.csv --model super"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic two-group dataset plus a sidecar of its true effects
    Simulate(SimulateArgs),
    /// Decomposition, model upgrade, diagnostics and overlap in one report
    Analyze(AnalyzeArgs),
    /// Scatter of final against initial values per group, as SVG
    Plot(PlotArgs),
    /// Residual symmetry and unimodality checks; exits 4 on a violation
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    LordNull,
    Gain,
    Confounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Model {
    /// w_final ~ intercept + group
    Sub,
    /// w_final ~ intercept + group + w_initial
    #[default]
    Super,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Width,
    Quantile,
    Edges(Vec<f64>),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Seed for every random draw
    #[arg(long, env = "PARADOXLENS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Preset::LordNull)]
    pub preset: Preset,
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub mu0: Option<f64>,
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long, value_parser = parse_sigma)]
    pub sigma: Option<f64>,
    /// Regression-to-the-mean coefficient in [-1, 1]
    #[arg(long, value_parser = parse_rho, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gain0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gain1: Option<f64>,
    /// gaussian, laplace, or mixture[:separation,weight]
    #[arg(long, value_parser = parse_noise)]
    pub noise: Option<Noise>,
    #[command(flatten)]
    pub seed: SeedArg,
    /// CSV path; the sidecar is written next to it as <stem>.scenario.json
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV with one row per subject
    pub input: PathBuf,
    #[arg(long, default_value = "id")]
    pub col_id: String,
    #[arg(long, default_value = "sex")]
    pub col_group: String,
    #[arg(long, default_value = "w_initial")]
    pub col_initial: String,
    #[arg(long, default_value = "w_final")]
    pub col_final: String,
}

impl InputArgs {
    pub fn columns(&self) -> ColumnMap {
        ColumnMap {
            id: self.col_id.clone(),
            group: self.col_group.clone(),
            w_initial: self.col_initial.clone(),
            w_final: self.col_final.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct BinArgs {
    /// Number of bins over the pooled initial values
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: Option<u64>,
    /// width, quantile, or edges:<e0,e1,...>
    #[arg(long, value_parser = parse_strategy)]
    pub bin_strategy: Option<Strategy>,
}

impl BinArgs {
    /// `None` when neither flag was given.
    pub fn spec(&self) -> Option<BinningSpec> {
        let bins = self.bins.map(|b| b as usize);
        match (&self.bin_strategy, bins) {
            (None, None) => None,
            (Some(Strategy::Edges(edges)), _) => Some(BinningSpec::Explicit { edges: edges.clone() }),
            (Some(Strategy::Width), k) => Some(BinningSpec::FixedWidth { bins: k.unwrap_or(10) }),
            (Some(Strategy::Quantile) | None, k) => Some(BinningSpec::Quantile { bins: k.unwrap_or(10) }),
        }
    }
}

#[derive(Debug, Args)]
pub struct DiagnosticArgs {
    /// Smallest stratum that gets a verdict
    #[arg(long, default_value_t = DEFAULT_MIN_N)]
    pub min_n: usize,
    /// Family-wise significance level of the diagnostics
    #[arg(long, value_parser = parse_alpha, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bins: BinArgs,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// SVG path
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Model::Super)]
    pub model: Model,
    #[command(flatten)]
    pub bins: BinArgs,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_rho(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if (-1.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("rho must lie in [-1, 1], got {v}"))
    }
}

pub fn parse_sigma(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("sigma must be positive, got {v}"))
    }
}

pub fn parse_alpha(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("alpha must lie in (0, 1), got {v}"))
    }
}

pub fn parse_noise(s: &str) -> Result<Noise, String> {
    let (family, params) = match s.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (s, None),
    };
    match (family.trim().to_ascii_lowercase().as_str(), params) {
        ("gaussian", None) => Ok(Noise::Gaussian),
        ("laplace", None) => Ok(Noise::Laplace),
        ("mixture", None) => Ok(Noise::DEFAULT_MIXTURE),
        ("mixture", Some(p)) => {
            let parts: Vec<&str> = p.split(',').collect();
            let [sep, weight] = parts[..] else {
                return Err("mixture takes `mixture:<separation>,<weight>`".into());
            };
            let separation = parse_f64(sep)?;
            let weight = parse_f64(weight)?;
            if separation < 0.0 {
                return Err("mixture separation must be non-negative".into());
            }
            if !(weight > 0.0 && weight < 1.0) {
                return Err("mixture weight must lie in (0, 1)".into());
            }
            Ok(Noise::Mixture { separation, weight })
        }
        (f, Some(_)) if f == "gaussian" || f == "laplace" => Err(format!("`{f}` takes no parameters")),
        (f, _) => Err(format!("unknown noise family `{f}` (expected gaussian, laplace or mixture)")),
    }
}

pub fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "width" => Ok(Strategy::Width),
        "quantile" => Ok(Strategy::Quantile),
        _ => {
            let list = s
                .strip_prefix("edges:")
                .ok_or_else(|| format!("unknown bin strategy `{s}` (expected width, quantile or edges:<list>)"))?;
            let edges = list.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?;
            if edges.len() < 2 {
                return Err("edges need at least two values".into());
            }
            if edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err("edges must be strictly increasing".into());
            }
            Ok(Strategy::Edges(edges))
        }
    }
}
