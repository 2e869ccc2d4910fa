//! Discretisation of the initial measure into subgroups.
//!
//! Bins are always built on the pooled `w_initial` values so that bin `i`
//! denotes the same subgroup in both groups. Intervals are left-closed and
//! right-open except the last, which is closed.

use serde::Serialize;

use crate::data::{Dataset, Group, Variable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum BinningSpec {
    FixedWidth { bins: usize },
    Quantile { bins: usize },
    Explicit { edges: Vec<f64> },
}

impl BinningSpec {
    /// Quantile binning with `k = max(2, floor(sqrt(n) / 2))`, reduced so that
    /// the smaller group expects at least five subjects per bin.
    pub fn default_for(ds: &Dataset) -> BinningSpec {
        let n = ds.len();
        let mut k = ((n as f64).sqrt() / 2.0).floor() as usize;
        k = k.max(2);
        let smaller = ds.count(Group::Zero).min(ds.count(Group::One));
        let cap = (smaller / 5).max(1);
        BinningSpec::Quantile { bins: k.min(cap) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinAssignment {
    /// Bin index per observation, in dataset order.
    pub bins: Vec<usize>,
    /// `num_bins() + 1` non-decreasing edges.
    pub edges: Vec<f64>,
}

impl BinAssignment {
    pub fn num_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_bins()];
        for &b in &self.bins {
            sizes[b] += 1;
        }
        sizes
    }
}

pub fn assign_bins(ds: &Dataset, spec: &BinningSpec) -> Result<BinAssignment> {
    if ds.is_empty() {
        return Err(Error::Validation("cannot bin an empty dataset".into()));
    }
    let values = ds.values(Variable::WInitial);
    let edges = match spec {
        BinningSpec::FixedWidth { bins } => fixed_width_edges(&values, *bins)?,
        BinningSpec::Quantile { bins } => quantile_edges(&values, *bins)?,
        BinningSpec::Explicit { edges } => {
            validate_explicit(edges)?;
            let uncovered: Vec<f64> = values
                .iter()
                .copied()
                .filter(|&v| v < edges[0] || v > edges[edges.len() - 1])
                .collect();
            if !uncovered.is_empty() {
                return Err(Error::Coverage { values: uncovered });
            }
            edges.clone()
        }
    };
    let bins = values.iter().map(|&v| locate(&edges, v)).collect();
    Ok(BinAssignment { bins, edges })
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Config {
            field: "bins",
            message: "at least one bin is required".into(),
        });
    }
    Ok(())
}

fn bounds(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn fixed_width_edges(values: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k)?;
    let (lo, hi) = bounds(values);
    if lo == hi {
        return Ok(vec![lo, hi]);
    }
    let width = (hi - lo) / k as f64;
    let mut edges: Vec<f64> = (0..k).map(|j| lo + width * j as f64).collect();
    edges.push(hi);
    Ok(edges)
}

/// Interior edges at the `j/k` sample quantiles (linear interpolation between
/// order statistics). Repeated edges from ties are merged, so fewer than `k`
/// bins may result.
fn quantile_edges(values: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut edges = vec![sorted[0]];
    for j in 1..k {
        let h = (n - 1) as f64 * j as f64 / k as f64;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let q = sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]);
        edges.push(q);
    }
    edges.push(sorted[n - 1]);
    edges.dedup();
    if edges.len() == 1 {
        edges.push(edges[0]);
    }
    Ok(edges)
}

fn validate_explicit(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::Config {
            field: "edges",
            message: "need at least two edges".into(),
        });
    }
    if edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::Config {
            field: "edges",
            message: "edges must be finite".into(),
        });
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config {
            field: "edges",
            message: "edges must be strictly increasing".into(),
        });
    }
    Ok(())
}

fn locate(edges: &[f64], v: f64) -> usize {
    let a = edges.len() - 1;
    let interior = &edges[1..a];
    interior.partition_point(|&e| e <= v)
}
