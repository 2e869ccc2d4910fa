//! Residual symmetry and unimodality checks.
//!
//! A regression coefficient reads as an effect only when the response is
//! symmetric about, and unimodal at, its conditional mean. These diagnostics
//! test both properties on residuals per group and per (group, bin) stratum.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binning::{assign_bins, BinningSpec};
use crate::data::{Dataset, Group};
use crate::error::{Error, Result};
use crate::ols::FitResult;
use crate::rng;

pub const DEFAULT_RESAMPLES: usize = 2000;
pub const DEFAULT_NULL_DRAWS: usize = 2000;
pub const DEFAULT_MIN_N: usize = 20;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Smallest sample the dip test accepts.
pub const DIP_MIN_N: usize = 10;

/// Bias-adjusted sample skewness `G1 = g1·sqrt(n(n−1))/(n−2)`.
///
/// `None` for zero variance or fewer than three values.
pub fn skewness(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (m2, m3) = values.iter().fold((0.0, 0.0), |(m2, m3), &v| {
        let d = v - mean;
        (m2 + d * d, m3 + d * d * d)
    });
    let (m2, m3) = (m2 / nf, m3 / nf);
    if m2 <= 0.0 {
        return None;
    }
    let g1 = m3 / m2.powf(1.5);
    Some(g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0))
}

/// Skewness of `signs ⊙ centered`, re-centred. `centered` must have mean zero.
fn flipped_abs_skew(centered: &[f64], rng: &mut rng::StreamRng) -> f64 {
    let n = centered.len() as f64;
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    let mut bits = 0u64;
    for (i, &c) in centered.iter().enumerate() {
        if i % 64 == 0 {
            bits = rng.random();
        }
        let y = if bits & 1 == 1 { c } else { -c };
        bits >>= 1;
        s1 += y;
        s2 += y * y;
        s3 += y * y * y;
    }
    let mean = s1 / n;
    let m2 = s2 / n - mean * mean;
    let m3 = s3 / n - 3.0 * mean * s2 / n + 2.0 * mean.powi(3);
    if m2 <= 0.0 {
        return 0.0;
    }
    (m3 / m2.powf(1.5)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryTest {
    pub skewness: f64,
    pub p: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Sign-flip bootstrap of the centred values with `|skewness|` as statistic.
///
/// `p = (1 + #{|G1_b| ≥ |G1|}) / (resamples + 1)`.
pub fn symmetry_test(values: &[f64], resamples: usize, seed: u64) -> Result<SymmetryTest> {
    let n = values.len();
    if n < 3 {
        return Err(Error::InsufficientN { n, min: 3 });
    }
    let skew = skewness(values).ok_or_else(|| Error::Degenerate("values have zero variance".into()))?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    // Same statistic as `skewness` up to the constant bias factor.
    let observed = {
        let nf = n as f64;
        let m2 = centered.iter().map(|c| c * c).sum::<f64>() / nf;
        let m3 = centered.iter().map(|c| c * c * c).sum::<f64>() / nf;
        (m3 / m2.powf(1.5)).abs()
    };
    let mut rng = rng::stream(seed);
    let tol = 1e-12 * observed.max(f64::MIN_POSITIVE);
    let exceed = (0..resamples)
        .filter(|_| flipped_abs_skew(&centered, &mut rng) >= observed - tol)
        .count();
    Ok(SymmetryTest {
        skewness: skew,
        p: (1 + exceed) as f64 / (resamples + 1) as f64,
        resamples,
        seed,
    })
}

/// Hartigan's dip: the sup-distance between the empirical CDF and the
/// closest unimodal CDF, via the greatest convex minorant / least concave
/// majorant construction. Equal values give 0; otherwise `dip ≥ 1/(2n)`.
pub fn dip_statistic(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    dip_sorted(&sorted)
}

fn dip_sorted(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 || xs[0] == xs[n - 1] {
        return 0.0;
    }
    // 1-based working arrays.
    let mut x = Vec::with_capacity(n + 1);
    x.push(f64::NAN);
    x.extend_from_slice(xs);
    let f = |i: usize| i as f64;

    let mut mn = vec![0usize; n + 1];
    let mut mj = vec![0usize; n + 1];
    let mut gcm = vec![0usize; n + 1];
    let mut lcm = vec![0usize; n + 1];

    // Change points of the convex minorant.
    mn[1] = 1;
    for j in 2..=n {
        mn[j] = j - 1;
        loop {
            let mnj = mn[j];
            let mnmnj = mn[mnj];
            if mnj == 1 || (x[j] - x[mnj]) * (f(mnj) - f(mnmnj)) < (x[mnj] - x[mnmnj]) * (f(j) - f(mnj)) {
                break;
            }
            mn[j] = mnmnj;
        }
    }
    // Change points of the concave majorant.
    mj[n] = n;
    for k in (1..n).rev() {
        mj[k] = k + 1;
        loop {
            let mjk = mj[k];
            let mjmjk = mj[mjk];
            if mjk == n || (x[k] - x[mjk]) * (f(mjk) - f(mjmjk)) < (x[mjk] - x[mjmjk]) * (f(k) - f(mjk)) {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    // Distances are in index units (n × CDF distance) until the end.
    let mut dip = 1.0;
    let mut low = 1usize;
    let mut high = n;
    loop {
        gcm[1] = high;
        let mut i = 1;
        while gcm[i] > low {
            gcm[i + 1] = mn[gcm[i]];
            i += 1;
        }
        let l_gcm = i;
        let mut ig = l_gcm;
        let mut ix = ig - 1;

        lcm[1] = low;
        i = 1;
        while lcm[i] < high {
            lcm[i + 1] = mj[lcm[i]];
            i += 1;
        }
        let l_lcm = i;
        let mut ih = l_lcm;
        let mut iv = 2usize;

        let mut d = 0.0;
        if l_gcm != 2 || l_lcm != 2 {
            loop {
                let gcmix = gcm[ix];
                let lcmiv = lcm[iv];
                if gcmix > lcmiv {
                    let gcmi1 = gcm[ix + 1];
                    let dx = (f(lcmiv) - f(gcmi1) + 1.0)
                        - (x[lcmiv] - x[gcmi1]) * (f(gcmix) - f(gcmi1)) / (x[gcmix] - x[gcmi1]);
                    iv += 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    let lcmiv1 = lcm[iv - 1];
                    let dx = (x[gcmix] - x[lcmiv1]) * (f(lcmiv) - f(lcmiv1)) / (x[lcmiv] - x[lcmiv1])
                        - (f(gcmix) - f(lcmiv1) - 1.0);
                    ix -= 1;
                    if dx >= d {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                ix = ix.max(1);
                iv = iv.min(l_lcm);
                if gcm[ix] == lcm[iv] {
                    break;
                }
            }
        } else {
            d = 1.0;
        }

        if d < dip {
            break;
        }

        let mut dip_l: f64 = 0.0;
        for j in ig..l_gcm {
            let mut max_t: f64 = 1.0;
            let jb = gcm[j + 1];
            let je = gcm[j];
            if je - jb > 1 && x[je] != x[jb] {
                let c = (f(je) - f(jb)) / (x[je] - x[jb]);
                for jr in jb..=je {
                    let t = (f(jr) - f(jb) + 1.0) - (x[jr] - x[jb]) * c;
                    max_t = max_t.max(t);
                }
            }
            dip_l = dip_l.max(max_t);
        }

        let mut dip_u: f64 = 0.0;
        for j in ih..l_lcm {
            let mut max_t: f64 = 1.0;
            let jb = lcm[j];
            let je = lcm[j + 1];
            if je - jb > 1 && x[je] != x[jb] {
                let c = (f(je) - f(jb)) / (x[je] - x[jb]);
                for jr in jb..=je {
                    let t = (x[jr] - x[jb]) * c - (f(jr) - f(jb) - 1.0);
                    max_t = max_t.max(t);
                }
            }
            dip_u = dip_u.max(max_t);
        }

        dip = dip.max(dip_l.max(dip_u));

        // No movement of the modal interval means no further improvement.
        if low == gcm[ig] && high == lcm[ih] {
            break;
        }
        low = gcm[ig];
        high = lcm[ih];
    }
    dip / (2.0 * n as f64)
}

/// Monte Carlo distribution of the dip for `n` uniform draws.
#[derive(Debug, Clone, PartialEq)]
pub struct DipNull {
    pub n: usize,
    pub seed: u64,
    /// Sorted ascending.
    dips: Vec<f64>,
}

impl DipNull {
    /// Draw `d` uses `substream(seed, d)`.
    pub fn simulate(n: usize, draws: usize, seed: u64) -> DipNull {
        let mut dips: Vec<f64> = (0..draws as u64)
            .into_par_iter()
            .map(|d| {
                let mut rng = rng::substream(seed, d);
                let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                u.sort_unstable_by(f64::total_cmp);
                dip_sorted(&u)
            })
            .collect();
        dips.sort_unstable_by(f64::total_cmp);
        DipNull { n, seed, dips }
    }

    pub fn draws(&self) -> usize {
        self.dips.len()
    }

    /// `(1 + #{null ≥ dip}) / (draws + 1)`
    pub fn p_value(&self, dip: f64) -> f64 {
        let below = self.dips.partition_point(|&d| d < dip);
        (1 + self.dips.len() - below) as f64 / (self.dips.len() + 1) as f64
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let idx = ((self.dips.len() - 1) as f64 * q).round() as usize;
        self.dips[idx]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnimodalityTest {
    pub dip: f64,
    pub p: f64,
    pub draws: usize,
    pub seed: u64,
}

pub fn unimodality_test(values: &[f64], draws: usize, seed: u64) -> Result<UnimodalityTest> {
    let null = DipNull::simulate(values.len().max(DIP_MIN_N), draws, seed);
    unimodality_test_with(values, &null)
}

/// Dip test against a precomputed null for the same sample size.
pub fn unimodality_test_with(values: &[f64], null: &DipNull) -> Result<UnimodalityTest> {
    let n = values.len();
    if n < DIP_MIN_N {
        return Err(Error::InsufficientN { n, min: DIP_MIN_N });
    }
    if null.n != n {
        return Err(Error::Consistency(format!(
            "null distribution simulated for n = {}, sample has n = {n}",
            null.n
        )));
    }
    let dip = dip_statistic(values);
    Ok(UnimodalityTest {
        dip,
        p: null.p_value(dip),
        draws: null.draws(),
        seed: null.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SupportsEffectReading,
    Violates,
    InsufficientN,
}

/// Multiplicity handling of the per-stratum threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjustment {
    /// Per-test threshold `alpha / (2 × tested strata)`.
    Bonferroni,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsConfig {
    pub min_n: usize,
    pub alpha: f64,
    pub adjustment: Adjustment,
    pub resamples: usize,
    pub null_draws: usize,
    pub seed: u64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            min_n: DEFAULT_MIN_N,
            alpha: DEFAULT_ALPHA,
            adjustment: Adjustment::Bonferroni,
            resamples: DEFAULT_RESAMPLES,
            null_draws: DEFAULT_NULL_DRAWS,
            seed: 0,
        }
    }
}

impl DiagnosticsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_n < DIP_MIN_N {
            return Err(Error::Config {
                field: "min_n",
                message: format!("must be at least {DIP_MIN_N}"),
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config {
                field: "alpha",
                message: "must lie in (0, 1)".into(),
            });
        }
        if self.resamples == 0 || self.null_draws == 0 {
            return Err(Error::Config {
                field: "resamples",
                message: "Monte Carlo sizes must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    pub group: Group,
    /// `None` for the whole group.
    pub bin: Option<usize>,
    pub n: usize,
    pub skewness: Option<f64>,
    pub symmetry_p: Option<f64>,
    pub dip_statistic: Option<f64>,
    pub dip_p: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub strata: Vec<Stratum>,
    pub overall: Verdict,
    /// Per-test threshold after adjustment.
    pub threshold: f64,
    pub config: DiagnosticsConfig,
    pub edges: Vec<f64>,
    pub rng: &'static str,
}

pub fn residual_diagnostics(
    ds: &Dataset,
    fit: &FitResult,
    spec: &BinningSpec,
    config: &DiagnosticsConfig,
) -> Result<DiagnosticsReport> {
    if fit.fingerprint != ds.fingerprint() {
        return Err(Error::Consistency("fit was computed on a different dataset".into()));
    }
    diagnose_residuals(ds, &fit.residuals, spec, config)
}

/// Stratified diagnostics of arbitrary per-observation residuals.
pub fn diagnose_residuals(
    ds: &Dataset,
    residuals: &[f64],
    spec: &BinningSpec,
    config: &DiagnosticsConfig,
) -> Result<DiagnosticsReport> {
    config.validate()?;
    if residuals.len() != ds.len() {
        return Err(Error::Consistency(format!(
            "{} residuals for {} observations",
            residuals.len(),
            ds.len()
        )));
    }
    let assignment = assign_bins(ds, spec)?;
    let mut cells: Vec<(Group, Option<usize>, Vec<f64>)> = Vec::new();
    for g in Group::BOTH {
        let pick = |bin: Option<usize>| -> Vec<f64> {
            ds.observations()
                .iter()
                .zip(residuals)
                .zip(&assignment.bins)
                .filter(|((o, _), &b)| o.group == g && bin.is_none_or(|want| want == b))
                .map(|((_, &r), _)| r)
                .collect()
        };
        cells.push((g, None, pick(None)));
        for b in 0..assignment.num_bins() {
            cells.push((g, Some(b), pick(Some(b))));
        }
    }

    let tested = cells.iter().filter(|c| c.2.len() >= config.min_n).count();
    let threshold = match config.adjustment {
        Adjustment::Bonferroni if tested > 0 => config.alpha / (2 * tested) as f64,
        _ => config.alpha,
    };

    let strata = cells
        .par_iter()
        .enumerate()
        .map(|(k, (group, bin, values))| {
            stratum(*group, *bin, values, k as u64, threshold, config)
        })
        .collect::<Result<Vec<_>>>()?;

    let overall = if strata.iter().any(|s| s.verdict == Verdict::Violates) {
        Verdict::Violates
    } else if strata.iter().all(|s| s.verdict == Verdict::InsufficientN) {
        Verdict::InsufficientN
    } else {
        Verdict::SupportsEffectReading
    };
    Ok(DiagnosticsReport {
        strata,
        overall,
        threshold,
        config: *config,
        edges: assignment.edges,
        rng: rng::ALGORITHM,
    })
}

fn stratum(
    group: Group,
    bin: Option<usize>,
    values: &[f64],
    index: u64,
    threshold: f64,
    config: &DiagnosticsConfig,
) -> Result<Stratum> {
    let n = values.len();
    let mut s = Stratum {
        group,
        bin,
        n,
        skewness: None,
        symmetry_p: None,
        dip_statistic: None,
        dip_p: None,
        verdict: Verdict::InsufficientN,
    };
    if n < config.min_n {
        return Ok(s);
    }
    let symmetry_seed = rng::substream_seed(config.seed, 2 * index);
    let dip_seed = rng::substream_seed(config.seed, 2 * index + 1);
    match symmetry_test(values, config.resamples, symmetry_seed) {
        Ok(t) => {
            s.skewness = Some(t.skewness);
            s.symmetry_p = Some(t.p);
        }
        // Constant residuals are trivially symmetric.
        Err(Error::Degenerate(_)) => s.symmetry_p = Some(1.0),
        Err(e) => return Err(e),
    }
    let u = unimodality_test(values, config.null_draws, dip_seed)?;
    s.dip_statistic = Some(u.dip);
    s.dip_p = Some(u.p);
    let ok = s.symmetry_p.unwrap() >= threshold && u.p >= threshold;
    s.verdict = if ok {
        Verdict::SupportsEffectReading
    } else {
        Verdict::Violates
    };
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinMoment {
    pub bin: usize,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReduction {
    pub group: Group,
    /// Population variance of the residuals in the group.
    pub marginal_var: f64,
    /// `Σ_bins p(bin | s)·Var(e | bin, s)`
    pub avg_conditional_var: f64,
    pub reduced: bool,
    /// `Σ_bins p(bin | s)·mean(e | bin, s)`; zero when residuals have zero
    /// group means.
    pub mixture_mean: f64,
    /// Per-bin conditional moments, reported without any assertion.
    pub bins: Vec<BinMoment>,
}

/// Law-of-total-variance comparison of the sub-model residuals.
pub fn variance_reduction_check(
    ds: &Dataset,
    submodel: &FitResult,
    spec: &BinningSpec,
) -> Result<[VarianceReduction; 2]> {
    if submodel.fingerprint != ds.fingerprint() {
        return Err(Error::Consistency("fit was computed on a different dataset".into()));
    }
    ds.require_both_groups()?;
    let assignment = assign_bins(ds, spec)?;
    let a = assignment.num_bins();
    let check = |g: Group| {
        let mut per_bin: Vec<Vec<f64>> = vec![Vec::new(); a];
        let mut all = Vec::new();
        for ((o, &r), &b) in ds
            .observations()
            .iter()
            .zip(&submodel.residuals)
            .zip(&assignment.bins)
        {
            if o.group == g {
                per_bin[b].push(r);
                all.push(r);
            }
        }
        let n = all.len() as f64;
        let (_, marginal_var) = mean_var(&all);
        let bins: Vec<BinMoment> = per_bin
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(bin, v)| {
                let (mean, variance) = mean_var(v);
                BinMoment {
                    bin,
                    n: v.len(),
                    mean,
                    variance,
                }
            })
            .collect();
        let avg_conditional_var = bins.iter().map(|b| b.n as f64 / n * b.variance).sum::<f64>();
        let mixture_mean = bins.iter().map(|b| b.n as f64 / n * b.mean).sum::<f64>();
        VarianceReduction {
            group: g,
            marginal_var,
            avg_conditional_var,
            reduced: avg_conditional_var <= marginal_var + 1e-10,
            mixture_mean,
            bins,
        }
    };
    Ok([check(Group::Zero), check(Group::One)])
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn skewness_cases() {
        assert_eq!(skewness(&[-1.0, 0.0, 1.0]), Some(0.0));
        assert!(skewness(&[0.0, 0.0, 0.0, 10.0]).unwrap() > 0.0);
        assert_eq!(skewness(&[2.0, 2.0, 2.0]), None);
        assert_eq!(skewness(&[1.0, 2.0]), None);
    }

    #[test]
    fn skewness_matches_closed_form() {
        // {0,0,0,10}: g1 = 1.1547005, G1 = g1·sqrt(12)/2 = 2.0
        let g = skewness(&[0.0, 0.0, 0.0, 10.0]).unwrap();
        assert!((g - 2.0).abs() < 1e-12, "{g}");
    }

    #[test]
    fn symmetry_test_errors() {
        assert!(matches!(symmetry_test(&[1.0, 2.0], 10, 0), Err(Error::InsufficientN { .. })));
        assert!(matches!(symmetry_test(&[1.0; 5], 10, 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn exactly_symmetric_sample_has_p_one() {
        let t = symmetry_test(&[-3.0, -1.0, 0.0, 1.0, 3.0], 200, 1).unwrap();
        assert_eq!(t.skewness, 0.0);
        assert_eq!(t.p, 1.0);
    }

    #[test]
    fn strongly_skewed_sample_rejects() {
        let mut rng = rng::stream(3);
        let v: Vec<f64> = (0..300).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let t = symmetry_test(&v, 500, 4).unwrap();
        assert!(t.skewness > 1.0);
        assert!(t.p < 0.01, "{t:?}");
    }

    #[test]
    fn dip_degenerate_and_small() {
        assert_eq!(dip_statistic(&[3.0; 12]), 0.0);
        assert_eq!(dip_statistic(&[1.0]), 0.0);
        assert!((dip_statistic(&[1.0, 2.0]) - 0.25).abs() < 1e-15);
        // evenly spaced points are as unimodal as a sample gets
        let even: Vec<f64> = (0..50).map(f64::from).collect();
        assert!((dip_statistic(&even) - 1.0 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn dip_two_clusters() {
        // Two equal point masses: dip 1/4.
        let mut v = vec![0.0; 20];
        v.extend(vec![1.0; 20]);
        assert!((dip_statistic(&v) - 0.25).abs() < 1e-12, "{}", dip_statistic(&v));
    }

    #[test]
    fn dip_orders_unimodal_below_bimodal() {
        let mut rng = rng::stream(8);
        let uni: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let bi: Vec<f64> = (0..500)
            .map(|i| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z + if i % 2 == 0 { -3.0 } else { 3.0 }
            })
            .collect();
        assert!(dip_statistic(&uni) < dip_statistic(&bi));
    }

    #[test]
    fn dip_null_p_values() {
        let null = DipNull::simulate(30, 199, 2);
        assert_eq!(null.draws(), 199);
        assert_eq!(null.p_value(0.0), 1.0);
        assert_eq!(null.p_value(1.0), 1.0 / 200.0);
        assert!(null.quantile(0.5) > 1.0 / 60.0);
        let again = DipNull::simulate(30, 199, 2);
        assert_eq!(null, again);
    }

    #[test]
    fn unimodality_requires_ten_points() {
        assert!(matches!(
            unimodality_test(&[1.0, 2.0, 3.0], 10, 0),
            Err(Error::InsufficientN { n: 3, min: 10 })
        ));
        let null = DipNull::simulate(12, 10, 0);
        assert!(matches!(
            unimodality_test_with(&[1.0; 11], &null),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn config_validation() {
        let ok = DiagnosticsConfig::default();
        assert!(ok.validate().is_ok());
        assert!(DiagnosticsConfig { min_n: 5, ..ok }.validate().is_err());
        assert!(DiagnosticsConfig { alpha: 0.0, ..ok }.validate().is_err());
    }
}
