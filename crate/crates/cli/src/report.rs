use std::fmt::Write as _;

use paradoxlens_core::decomposition::Decomposition;
use paradoxlens_core::diagnostics::{DiagnosticsReport, VarianceReduction, Verdict};
use paradoxlens_core::ols::{FitResult, Term};
use paradoxlens_core::supermodel::SupermodelReport;
use paradoxlens_core::OverlapReport;
use serde::Serialize;

/// |t| above this counts as significant in the narrative.
pub const T_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub n: usize,
    pub group_counts: [usize; 2],
    pub fingerprint: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub input: InputSummary,
    /// gain ~ intercept + group; its group coefficient is A1.
    pub unadjusted: FitResult,
    pub decomposition: Decomposition,
    pub supermodel: SupermodelReport,
    pub diagnostics: DiagnosticsReport,
    pub variance_reduction: [VarianceReduction; 2],
    pub overlap: OverlapReport,
    pub t_threshold: f64,
    pub narrative: String,
}

impl ReportBundle {
    pub fn new(
        input: InputSummary,
        unadjusted: FitResult,
        decomposition: Decomposition,
        supermodel: SupermodelReport,
        diagnostics: DiagnosticsReport,
        variance_reduction: [VarianceReduction; 2],
        overlap: OverlapReport,
    ) -> Self {
        let mut bundle = ReportBundle {
            input,
            unadjusted,
            decomposition,
            supermodel,
            diagnostics,
            variance_reduction,
            overlap,
            t_threshold: T_THRESHOLD,
            narrative: String::new(),
        };
        bundle.narrative = narrative(&bundle);
        bundle
    }
}

/// Shortest representation that parses back to the same value, so every
/// number in the narrative equals a JSON field exactly.
fn num(v: f64) -> String {
    format!("{v}")
}

fn significance(t: f64, threshold: f64) -> &'static str {
    if t.abs() > threshold {
        "significant"
    } else {
        "not significant"
    }
}

pub fn narrative(b: &ReportBundle) -> String {
    let d = &b.decomposition;
    let s = &b.supermodel;
    let th = b.t_threshold;
    let a1_t = b.unadjusted.t(Term::Group).unwrap_or(f64::NAN);
    let adj = s.composed.group;
    let adj_t = s.composed_group_t;
    let mut out = String::new();

    let _ = writeln!(
        out,
        "Data: {} subjects in group zero and {} in group one.",
        b.input.group_counts[0], b.input.group_counts[1]
    );
    let unadjusted = if a1_t.abs() > th {
        if d.a1 > 0.0 {
            "group one gains more on average"
        } else {
            "group one gains less on average"
        }
    } else {
        "the groups gain the same on average and there is no group effect"
    };
    let _ = writeln!(
        out,
        "Unadjusted reading: the mean gain of group one minus group zero is A1 = {} (t = {}, {} at |t| > {}); on this reading {}.",
        num(d.a1),
        num(a1_t),
        significance(a1_t, th),
        num(th),
        unadjusted
    );
    let adjusted = if adj_t.abs() > th {
        if adj > 0.0 {
            "group one gains more than group zero at the same initial value"
        } else {
            "group one gains less than group zero at the same initial value"
        }
    } else {
        "the groups gain the same at any given initial value"
    };
    let _ = writeln!(
        out,
        "Adjusted reading: with the initial value in the model the group coefficient is {} (t = {}, {} at |t| > {}); on this reading {}.",
        num(adj),
        num(adj_t),
        significance(adj_t, th),
        num(th),
        adjusted
    );
    let _ = writeln!(
        out,
        "Stratified reading: weighting the within-bin gain differences by the pooled initial distribution gives A2 = {}, a confounding effect A2 - A1 of {}; the groups' initial distributions differ by {} in total variation.",
        num(d.a2),
        num(d.confounding_effect),
        num(d.weight_divergence)
    );
    let _ = writeln!(
        out,
        "Resolution: A1 answers how much more a member of group one gains on average, a predictive question. The adjusted coefficient and A2 answer how much more at the same initial value, a conditional question. Each reading is correct for its own question, so the two conclusions do not contradict each other."
    );
    if b.overlap.extrapolation_required {
        let _ = writeln!(
            out,
            "Warning: only {} of group zero and {} of group one lie inside the common initial range; statements outside it extrapolate.",
            num(b.overlap.inside_fraction[0]),
            num(b.overlap.inside_fraction[1])
        );
    }
    if !d.excluded_bins.is_empty() {
        let _ = writeln!(out, "Warning: some bins hold only one group and are left out of A2.");
    }
    let diag = match b.diagnostics.overall {
        Verdict::SupportsEffectReading => {
            "support reading the adjusted coefficient as an effect (symmetric, unimodal residuals in every stratum)"
        }
        Verdict::Violates => {
            "do not support reading the adjusted coefficient as an effect: residuals are asymmetric or multimodal in at least one stratum"
        }
        Verdict::InsufficientN => "are inconclusive because every stratum is below the minimum size",
    };
    let _ = writeln!(out, "Diagnostics: the residuals of the adjusted model {diag}.");
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

pub fn decomposition_table(d: &Decomposition) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4} {:>10} {:>6} {:>6} {:>10} {:>10} {:>8} {:>8} {:>8}",
        "bin", "center", "n1", "n0", "gain_1", "gain_0", "f1", "f0", "f"
    );
    for (i, b) in d.table.bins.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4} {:>10.3} {:>6} {:>6} {:>10} {:>10} {:>8.4} {:>8.4} {:>8.4}",
            i,
            b.center,
            b.n1,
            b.n0,
            opt(b.mean_gain_1),
            opt(b.mean_gain_0),
            b.f1,
            b.f0,
            b.f
        );
    }
    out
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::SupportsEffectReading => "supports_effect_reading",
        Verdict::Violates => "violates",
        Verdict::InsufficientN => "insufficient_n",
    }
}

pub fn diagnostics_table(r: &DiagnosticsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>4} {:>6} {:>9} {:>10} {:>8} {:>8}  verdict",
        "group", "bin", "n", "skewness", "symmetry_p", "dip", "dip_p"
    );
    for s in &r.strata {
        let _ = writeln!(
            out,
            "{:>5} {:>4} {:>6} {:>9} {:>10} {:>8} {:>8}  {}",
            s.group.index(),
            s.bin.map_or_else(|| "all".to_string(), |b| b.to_string()),
            s.n,
            opt(s.skewness),
            opt(s.symmetry_p),
            opt(s.dip_statistic),
            opt(s.dip_p),
            verdict_name(s.verdict)
        );
    }
    let _ = writeln!(
        out,
        "per-test threshold {:.6} (alpha {} over {} tested strata), overall: {}",
        r.threshold,
        r.config.alpha,
        r.strata.iter().filter(|s| s.verdict != Verdict::InsufficientN).count(),
        verdict_name(r.overall)
    );
    out
}

pub fn render_text(b: &ReportBundle) -> String {
    let mut out = b.narrative.clone();
    out.push_str("\nSubgroup table\n");
    out.push_str(&decomposition_table(&b.decomposition));
    out.push_str("\nResidual diagnostics (adjusted model)\n");
    out.push_str(&diagnostics_table(&b.diagnostics));
    out
}
