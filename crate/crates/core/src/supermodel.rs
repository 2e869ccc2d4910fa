//! Building the baseline-adjusted regression out of the unadjusted one.
//!
//! 1. Sub-model: `w_final = mu_G + (mu_B − mu_G)·s + e1`.
//! 2. Residual stage: `e1 = a0·[s = 0] + a1·[s = 1] + b0·w_initial + e2`.
//! 3. Composition: `w_final = (mu_G + a0) + (mu_B − mu_G − a0 + a1)·s + b0·w_initial + e2`.
//!
//! The composed coefficients are compared against a direct fit of
//! `w_final ~ intercept + group + w_initial`; the two agree because the
//! residual-stage design contains the sub-model's column space.

use serde::Serialize;

use crate::data::{Dataset, Group, Variable};
use crate::error::{Error, Result};
use crate::ols::{self, fit, least_squares, DesignSpec, FitResult, OlsSolution, Term};

/// Relative bound on `max_composition_delta`.
pub const COMPOSITION_TOLERANCE: f64 = 1e-8;

/// Standard errors of a group's mean gain within which the group counts as
/// unchanged on average.
pub const NULL_SCENARIO_SE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualStageFit {
    /// Group-zero residual intercept.
    pub a0: f64,
    /// Group-one residual intercept.
    pub a1: f64,
    /// Common slope on `w_initial`.
    pub b0: f64,
    #[serde(skip)]
    pub stage_residuals: Vec<f64>,
    pub fit: OlsSolution,
    /// Per-group population variance of the sub-model residuals.
    pub submodel_residual_variance: [f64; 2],
    /// Per-group population variance of the stage residuals.
    pub stage_residual_variance: [f64; 2],
    #[serde(skip)]
    pub fingerprint: String,
}

impl ResidualStageFit {
    /// Mean of the stage residuals within each group.
    pub fn group_means(&self, ds: &Dataset) -> [f64; 2] {
        group_moments(ds, &self.stage_residuals).map(|(m, _)| m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComposedCoefficients {
    pub intercept: f64,
    pub group: f64,
    pub w_initial: f64,
}

impl ComposedCoefficients {
    pub fn as_array(&self) -> [f64; 3] {
        [self.intercept, self.group, self.w_initial]
    }
}

/// Separate-slope refit of the sub-model residuals, reported only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeGap {
    pub slope0: f64,
    pub slope1: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioFlags {
    /// `mean(w_final) − mean(w_initial)` per group.
    pub mean_change: [f64; 2],
    /// Threshold applied to `|mean_change|` per group.
    pub tolerance: [f64; 2],
    /// Both groups are unchanged on average.
    pub null_scenario: bool,
    /// `max |e1 − gain|`, reported only. Per subject `e1 − gain` equals
    /// `w_initial − mean(w_final | group)`, so the residuals match the gains on
    /// average within a group only when the group is unchanged on average.
    pub max_residual_gain_gap: f64,
}

/// The group coefficient does not depend on whether the response is the final
/// measure or the gain; the `w_initial` coefficients differ by one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainEquivalence {
    pub group_coef_final: f64,
    pub group_coef_gain: f64,
    pub w_initial_coef_final: f64,
    pub w_initial_coef_gain: f64,
}

impl GainEquivalence {
    pub fn group_gap(&self) -> f64 {
        (self.group_coef_final - self.group_coef_gain).abs()
    }

    /// `|(b_final − b_gain) − 1|`
    pub fn slope_gap(&self) -> f64 {
        ((self.w_initial_coef_final - self.w_initial_coef_gain) - 1.0).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupermodelReport {
    pub submodel: FitResult,
    pub stage: ResidualStageFit,
    pub composed: ComposedCoefficients,
    pub direct: FitResult,
    /// `|composed − direct|` for intercept, group and w_initial.
    pub deltas: [f64; 3],
    pub max_composition_delta: f64,
    /// `max_composition_delta / max(1, max |direct coefficient|)`
    pub relative_composition_delta: f64,
    pub composition_within_tolerance: bool,
    /// t-statistic of the composed group coefficient (from the joint fit).
    pub composed_group_t: f64,
    pub slope_gap: Option<SlopeGap>,
    pub flags: ScenarioFlags,
    pub gain_equivalence: GainEquivalence,
}

pub fn fit_submodel(ds: &Dataset) -> Result<FitResult> {
    ds.require_both_groups()?;
    fit(ds, &DesignSpec::group_means(Variable::WFinal))
}

pub fn fit_residual_stage(ds: &Dataset, submodel: &FitResult) -> Result<ResidualStageFit> {
    check_fingerprint(ds, &submodel.fingerprint, "sub-model")?;
    ds.require_both_groups()?;
    let names = ["group0", "group1", "w_initial"].map(String::from);
    let columns = [Term::Group0, Term::Group1, Term::W_INITIAL].map(|t| t.column(ds));
    let solution = least_squares(&names, &columns, &submodel.residuals, true)?;
    let [a0, a1, b0] = [0, 1, 2].map(|i| solution.coefficients[i]);
    Ok(ResidualStageFit {
        a0,
        a1,
        b0,
        stage_residuals: solution.residuals.clone(),
        submodel_residual_variance: group_moments(ds, &submodel.residuals).map(|(_, v)| v),
        stage_residual_variance: group_moments(ds, &solution.residuals).map(|(_, v)| v),
        fit: solution,
        fingerprint: ds.fingerprint().to_string(),
    })
}

pub fn compose(ds: &Dataset, submodel: &FitResult, stage: &ResidualStageFit) -> Result<SupermodelReport> {
    check_fingerprint(ds, &submodel.fingerprint, "sub-model")?;
    check_fingerprint(ds, &stage.fingerprint, "residual stage")?;
    let mu_g = submodel.coef(Term::Intercept).ok_or_else(|| not_submodel(submodel))?;
    let diff = submodel.coef(Term::Group).ok_or_else(|| not_submodel(submodel))?;
    let composed = ComposedCoefficients {
        intercept: mu_g + stage.a0,
        group: diff - stage.a0 + stage.a1,
        w_initial: stage.b0,
    };

    let direct = fit(ds, &DesignSpec::ancova(Variable::WFinal))?;
    let direct_coefs = [Term::Intercept, Term::Group, Term::W_INITIAL].map(|t| direct.coef(t).expect("ancova term"));
    let composed_coefs = composed.as_array();
    let deltas = [0, 1, 2].map(|i| (composed_coefs[i] - direct_coefs[i]).abs());
    let max_composition_delta = deltas.iter().copied().fold(0.0, f64::max);
    let scale = direct_coefs.iter().map(|c| c.abs()).fold(1.0, f64::max);
    let relative_composition_delta = max_composition_delta / scale;

    let w = ds.values(Variable::WInitial);
    let slope_gap = ols::per_group_slopes(ds, &w, &submodel.residuals)
        .ok()
        .map(|[slope0, slope1]| SlopeGap {
            slope0,
            slope1,
            gap: slope1 - slope0,
        });

    Ok(SupermodelReport {
        composed_group_t: direct.t(Term::Group).expect("ancova term"),
        flags: scenario_flags(ds, submodel),
        gain_equivalence: gain_equivalence(ds)?,
        submodel: submodel.clone(),
        stage: stage.clone(),
        composed,
        direct,
        deltas,
        max_composition_delta,
        relative_composition_delta,
        composition_within_tolerance: relative_composition_delta <= COMPOSITION_TOLERANCE,
        slope_gap,
    })
}

/// Runs the three stages on one dataset.
pub fn upgrade(ds: &Dataset) -> Result<SupermodelReport> {
    let submodel = fit_submodel(ds)?;
    let stage = fit_residual_stage(ds, &submodel)?;
    compose(ds, &submodel, &stage)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionImprovement {
    pub sse_sub: f64,
    pub sse_super: f64,
}

pub fn prediction_improvement(ds: &Dataset, report: &SupermodelReport) -> Result<PredictionImprovement> {
    check_fingerprint(ds, &report.submodel.fingerprint, "report")?;
    let c = report.composed;
    let sse_super = ds
        .observations()
        .iter()
        .map(|o| {
            let pred = c.intercept + c.group * o.group.indicator() + c.w_initial * o.w_initial;
            (o.w_final - pred).powi(2)
        })
        .sum();
    let sse_sub = report.submodel.residuals.iter().map(|r| r * r).sum();
    Ok(PredictionImprovement { sse_sub, sse_super })
}

pub fn gain_equivalence(ds: &Dataset) -> Result<GainEquivalence> {
    let on_final = fit(ds, &DesignSpec::ancova(Variable::WFinal))?;
    let on_gain = fit(ds, &DesignSpec::ancova(Variable::Gain))?;
    Ok(GainEquivalence {
        group_coef_final: on_final.coef(Term::Group).expect("ancova term"),
        group_coef_gain: on_gain.coef(Term::Group).expect("ancova term"),
        w_initial_coef_final: on_final.coef(Term::W_INITIAL).expect("ancova term"),
        w_initial_coef_gain: on_gain.coef(Term::W_INITIAL).expect("ancova term"),
    })
}

fn scenario_flags(ds: &Dataset, submodel: &FitResult) -> ScenarioFlags {
    let gains = ds.values(Variable::Gain);
    let moments = group_moments(ds, &gains);
    let mut mean_change = [0.0; 2];
    let mut tolerance = [0.0; 2];
    for g in Group::BOTH {
        let i = g.index();
        let n = ds.count(g) as f64;
        let (mean, var) = moments[i];
        mean_change[i] = mean;
        let sample_var = if n > 1.0 { var * n / (n - 1.0) } else { 0.0 };
        tolerance[i] = NULL_SCENARIO_SE * (sample_var / n).sqrt();
    }
    let null_scenario = (0..2).all(|i| mean_change[i].abs() <= tolerance[i]);
    let max_residual_gain_gap = submodel
        .residuals
        .iter()
        .zip(&gains)
        .map(|(e, d)| (e - d).abs())
        .fold(0.0, f64::max);
    ScenarioFlags {
        mean_change,
        tolerance,
        null_scenario,
        max_residual_gain_gap,
    }
}

/// Per-group (mean, population variance) of `values`.
pub(crate) fn group_moments(ds: &Dataset, values: &[f64]) -> [(f64, f64); 2] {
    let mut out = [(0.0, 0.0); 2];
    for g in Group::BOTH {
        let vals: Vec<f64> = ds
            .observations()
            .iter()
            .zip(values)
            .filter(|(o, _)| o.group == g)
            .map(|(_, &v)| v)
            .collect();
        if vals.is_empty() {
            continue;
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        out[g.index()] = (mean, var);
    }
    out
}

fn check_fingerprint(ds: &Dataset, fingerprint: &str, what: &str) -> Result<()> {
    if fingerprint != ds.fingerprint() {
        return Err(Error::Consistency(format!(
            "{what} was fitted on a different dataset"
        )));
    }
    Ok(())
}

fn not_submodel(fit: &FitResult) -> Error {
    Error::Consistency(format!(
        "expected a sub-model with intercept and group terms, got {:?}",
        fit.spec.term_names()
    ))
}
