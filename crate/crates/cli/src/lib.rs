//! Command implementations behind the `paradoxlens` binary.

pub mod args;
pub mod plot;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use paradoxlens_core::decomposition::compute_a2;
use paradoxlens_core::diagnostics::{residual_diagnostics, variance_reduction_check, DiagnosticsConfig, Verdict};
use paradoxlens_core::ols::{fit, DesignSpec};
use paradoxlens_core::simulate::{generate, ScenarioConfig, Sidecar};
use paradoxlens_core::supermodel::{fit_submodel, upgrade};
use paradoxlens_core::{load_csv, save_csv, support_overlap, BinningSpec, Dataset, Error, Variable};

use args::{AnalyzeArgs, BinArgs, Command, DiagnoseArgs, DiagnosticArgs, Format, Model, PlotArgs, Preset, SimulateArgs};
use report::{InputSummary, ReportBundle};

/// Process exit status; the discriminants are the stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Failure = 1,
    Usage = 2,
    NoOverlap = 3,
    Violation = 4,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Status for a failed command.
pub fn exit_for(err: &anyhow::Error) -> Exit {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::NoOverlap) => Exit::NoOverlap,
        Some(Error::Config { .. }) => Exit::Usage,
        _ => Exit::Failure,
    }
}

pub fn run(command: &Command) -> Result<Exit> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    }
}

pub fn scenario_from(a: &SimulateArgs) -> ScenarioConfig {
    let base = match a.preset {
        Preset::LordNull => ScenarioConfig::lord_null(),
        Preset::Gain => ScenarioConfig::gain(),
        Preset::Confounded => ScenarioConfig::confounded(),
    };
    ScenarioConfig {
        n0: a.n0.unwrap_or(base.n0),
        n1: a.n1.unwrap_or(base.n1),
        mu0: a.mu0.unwrap_or(base.mu0),
        mu1: a.mu1.unwrap_or(base.mu1),
        sigma: a.sigma.unwrap_or(base.sigma),
        rho: a.rho.unwrap_or(base.rho),
        gain0: a.gain0.unwrap_or(base.gain0),
        gain1: a.gain1.unwrap_or(base.gain1),
        noise: a.noise.unwrap_or(base.noise),
        seed: a.seed.seed,
    }
}

/// `data.csv` → `data.scenario.json`
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.scenario.json"))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Exit> {
    let cfg = scenario_from(a);
    let (ds, _) = generate(&cfg)?;
    save_csv(&a.output, &ds)?;
    let sidecar = sidecar_path(&a.output);
    let json = serde_json::to_string_pretty(&Sidecar::new(cfg))? + "\n";
    fs::write(&sidecar, json).with_context(|| format!("writing {}", sidecar.display()))?;
    Ok(Exit::Success)
}

fn load(input: &args::InputArgs) -> Result<Dataset> {
    load_csv(&input.input, &input.columns()).with_context(|| format!("loading {}", input.input.display()))
}

fn diag_config(d: &DiagnosticArgs) -> DiagnosticsConfig {
    DiagnosticsConfig {
        min_n: d.min_n,
        alpha: d.alpha,
        seed: d.seed.seed,
        ..Default::default()
    }
}

fn diagnostic_bins(bins: &BinArgs) -> BinningSpec {
    bins.spec().unwrap_or(BinningSpec::Quantile {
        bins: args::DEFAULT_DIAGNOSTIC_BINS,
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// The full report for a loaded dataset.
pub fn analyze_dataset(ds: &Dataset, bins: &BinArgs, diagnostics: &DiagnosticsConfig) -> Result<ReportBundle> {
    let overlap = support_overlap(ds)?;
    let spec = bins.spec().unwrap_or_else(|| BinningSpec::default_for(ds));
    let decomposition = compute_a2(ds, &spec)?;
    let unadjusted = fit(ds, &DesignSpec::group_means(Variable::Gain))?;
    let supermodel = upgrade(ds)?;
    let diag = residual_diagnostics(ds, &supermodel.direct, &diagnostic_bins(bins), diagnostics)?;
    let variance_reduction = variance_reduction_check(ds, &supermodel.submodel, &spec)?;
    let input = InputSummary {
        n: ds.len(),
        group_counts: ds.group_counts(),
        fingerprint: ds.fingerprint().to_string(),
    };
    Ok(ReportBundle::new(
        input,
        unadjusted,
        decomposition,
        supermodel,
        diag,
        variance_reduction,
        overlap,
    ))
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<Exit> {
    let ds = load(&a.input)?;
    let bundle = analyze_dataset(&ds, &a.bins, &diag_config(&a.diagnostics))?;
    if bundle.overlap.extrapolation_required {
        eprintln!("warning: some subjects lie outside the common initial range; comparisons there extrapolate");
    }
    let text = match a.output.format {
        Format::Json => serde_json::to_string_pretty(&bundle)? + "\n",
        Format::Text => report::render_text(&bundle),
    };
    emit(&a.output.output, &text)?;
    Ok(Exit::Success)
}

pub fn cmd_plot(a: &PlotArgs) -> Result<Exit> {
    let ds = load(&a.input)?;
    let svg = plot::render_svg(&ds)?;
    fs::write(&a.output, svg).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(Exit::Success)
}

pub fn cmd_diagnose(a: &DiagnoseArgs) -> Result<Exit> {
    let ds = load(&a.input)?;
    let model = match a.model {
        Model::Sub => fit_submodel(&ds)?,
        Model::Super => upgrade(&ds)?.direct,
    };
    let report = residual_diagnostics(&ds, &model, &diagnostic_bins(&a.bins), &diag_config(&a.diagnostics))?;
    let text = match a.output.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Text => report::diagnostics_table(&report),
    };
    emit(&a.output.output, &text)?;
    Ok(match report.overall {
        Verdict::Violates => Exit::Violation,
        Verdict::InsufficientN => {
            eprintln!("warning: every stratum has fewer than {} observations; no verdict issued", report.config.min_n);
            Exit::Success
        }
        Verdict::SupportsEffectReading => Exit::Success,
    })
}
