//! Difference of group mean gains versus the pooled-weighted difference of
//! subgroup mean gains.
//!
//! With subgroups `i` (bins of the initial measure), group-one counts `n_i`
//! and group-zero counts `m_i`:
//!
//! ```text
//! f1_i = n_i / Σn      f0_i = m_i / Σm      f_i = (n_i + m_i) / N
//! alpha = Σn / N       f_i = alpha·f1_i + (1 − alpha)·f0_i
//! A1 = Σ D̄1_i·f1_i − Σ D̄0_i·f0_i      (difference of group means)
//! A2 = Σ (D̄1_i − D̄0_i)·f_i              (pooled weights)
//! ```
//!
//! A2 only uses bins that contain both groups, with `f` renormalised over
//! them; the other bins are reported in `excluded_bins`.

use serde::Serialize;

use crate::binning::{assign_bins, BinAssignment, BinningSpec};
use crate::data::{Dataset, Group, Variable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupRow {
    pub center: f64,
    pub n1: usize,
    pub n0: usize,
    /// `None` when the group is absent from the bin.
    pub mean_gain_1: Option<f64>,
    pub mean_gain_0: Option<f64>,
    pub f1: f64,
    pub f0: f64,
    pub f: f64,
}

impl SubgroupRow {
    pub fn has_both_groups(&self) -> bool {
        self.n1 > 0 && self.n0 > 0
    }

    pub fn effect(&self) -> Option<f64> {
        Some(self.mean_gain_1? - self.mean_gain_0?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupTable {
    pub alpha: f64,
    pub bins: Vec<SubgroupRow>,
}

impl SubgroupTable {
    pub fn build(ds: &Dataset, assignment: &BinAssignment) -> Result<Self> {
        ds.require_both_groups()?;
        let a = assignment.num_bins();
        let mut counts = vec![[0usize; 2]; a];
        let mut sums = vec![[0.0f64; 2]; a];
        for (o, &bin) in ds.observations().iter().zip(&assignment.bins) {
            counts[bin][o.group.index()] += 1;
            sums[bin][o.group.index()] += o.gain();
        }
        let total_1 = ds.count(Group::One) as f64;
        let total_0 = ds.count(Group::Zero) as f64;
        let total = ds.len() as f64;
        let mean = |s: f64, c: usize| (c > 0).then(|| s / c as f64);
        let bins = assignment
            .centers()
            .into_iter()
            .enumerate()
            .map(|(i, center)| {
                let [m, n] = counts[i];
                SubgroupRow {
                    center,
                    n1: n,
                    n0: m,
                    mean_gain_1: mean(sums[i][1], n),
                    mean_gain_0: mean(sums[i][0], m),
                    f1: n as f64 / total_1,
                    f0: m as f64 / total_0,
                    f: (n + m) as f64 / total,
                }
            })
            .collect();
        Ok(SubgroupTable {
            alpha: total_1 / total,
            bins,
        })
    }

    /// Largest `|f_i − (alpha·f1_i + (1 − alpha)·f0_i)|` over bins.
    pub fn mixture_error(&self) -> f64 {
        self.bins
            .iter()
            .map(|b| (b.f - (self.alpha * b.f1 + (1.0 - self.alpha) * b.f0)).abs())
            .fold(0.0, f64::max)
    }

    /// Each group's mean gain re-expressed through its own weights.
    pub fn a1_from_own_weights(&self) -> f64 {
        let one: f64 = self
            .bins
            .iter()
            .filter_map(|b| b.mean_gain_1.map(|d| d * b.f1))
            .sum();
        let zero: f64 = self
            .bins
            .iter()
            .filter_map(|b| b.mean_gain_0.map(|d| d * b.f0))
            .sum();
        one - zero
    }

    fn retained(&self) -> impl Iterator<Item = &SubgroupRow> {
        self.bins.iter().filter(|b| b.has_both_groups())
    }

    /// `½ Σ (D̄1_i − D̄0_i)(f1_i + f0_i)` over bins holding both groups, each
    /// weight vector renormalised over those bins.
    pub fn half_sum(&self) -> f64 {
        let s1: f64 = self.retained().map(|b| b.f1).sum();
        let s0: f64 = self.retained().map(|b| b.f0).sum();
        0.5 * self
            .retained()
            .map(|b| b.effect().unwrap_or(0.0) * (b.f1 / s1 + b.f0 / s0))
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub a1: f64,
    pub a2: f64,
    pub confounding_effect: f64,
    pub weight_divergence: f64,
    #[serde(flatten)]
    pub table: SubgroupTable,
    /// Bins lacking one of the groups; they do not contribute to `a2`.
    pub excluded_bins: Vec<usize>,
    /// Middle expression of the A1/A2 inequality chain, for reference.
    pub half_sum: f64,
    pub edges: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectPoint {
    pub bin: usize,
    pub center: f64,
    /// `D̄1_i − D̄0_i`
    pub effect: f64,
    /// Pooled weight renormalised over bins holding both groups.
    pub weight: f64,
}

pub fn compute_a1(ds: &Dataset) -> Result<f64> {
    ds.require_both_groups()?;
    let one = ds.group_mean(Group::One, Variable::Gain).expect("group present");
    let zero = ds.group_mean(Group::Zero, Variable::Gain).expect("group present");
    Ok(one - zero)
}

pub fn conditional_effect_curve(ds: &Dataset, spec: &BinningSpec) -> Result<Vec<EffectPoint>> {
    let assignment = assign_bins(ds, spec)?;
    let table = SubgroupTable::build(ds, &assignment)?;
    effect_curve(&table)
}

fn effect_curve(table: &SubgroupTable) -> Result<Vec<EffectPoint>> {
    let total: f64 = table.retained().map(|b| b.f).sum();
    if total == 0.0 {
        return Err(Error::NoOverlap);
    }
    Ok(table
        .bins
        .iter()
        .enumerate()
        .filter_map(|(bin, b)| {
            b.effect().map(|effect| EffectPoint {
                bin,
                center: b.center,
                effect,
                weight: b.f / total,
            })
        })
        .collect())
}

pub fn compute_a2(ds: &Dataset, spec: &BinningSpec) -> Result<Decomposition> {
    let assignment = assign_bins(ds, spec)?;
    let table = SubgroupTable::build(ds, &assignment)?;
    let curve = effect_curve(&table)?;
    let a1 = compute_a1(ds)?;
    let a2: f64 = curve.iter().map(|p| p.effect * p.weight).sum();
    let excluded_bins = table
        .bins
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.has_both_groups())
        .map(|(i, _)| i)
        .collect();
    Ok(Decomposition {
        a1,
        a2,
        confounding_effect: a2 - a1,
        weight_divergence: weight_divergence(&table),
        half_sum: table.half_sum(),
        excluded_bins,
        edges: assignment.edges,
        table,
    })
}

/// Total variation distance `½ Σ |f1_i − f0_i|` between the groups' bin
/// distributions.
pub fn weight_divergence(table: &SubgroupTable) -> f64 {
    0.5 * table.bins.iter().map(|b| (b.f1 - b.f0).abs()).sum::<f64>()
}
