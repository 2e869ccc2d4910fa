use serde::Serialize;

use crate::data::{Dataset, Group};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
}

/// Common support of `w_initial` between the two groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    /// Indexed by group.
    pub ranges: [Range; 2],
    /// `None` when the ranges are disjoint.
    pub intersection: Option<Range>,
    /// Share of each group's subjects lying inside the intersection.
    pub inside_fraction: [f64; 2],
    /// Some subjects lie outside the common support, so comparing them
    /// requires extrapolation.
    pub extrapolation_required: bool,
}

pub fn support_overlap(ds: &Dataset) -> Result<OverlapReport> {
    ds.require_both_groups()?;
    let mut ranges = [Range {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    }; 2];
    for o in ds.observations() {
        let r = &mut ranges[o.group.index()];
        r.min = r.min.min(o.w_initial);
        r.max = r.max.max(o.w_initial);
    }
    let lo = ranges[0].min.max(ranges[1].min);
    let hi = ranges[0].max.min(ranges[1].max);
    let intersection = (lo <= hi).then_some(Range { min: lo, max: hi });

    let mut inside = [0usize; 2];
    if let Some(common) = intersection {
        for o in ds.observations() {
            if common.contains(o.w_initial) {
                inside[o.group.index()] += 1;
            }
        }
    }
    let inside_fraction = Group::BOTH.map(|g| inside[g.index()] as f64 / ds.count(g) as f64);
    let extrapolation_required = inside_fraction.iter().any(|&f| f < 1.0);
    Ok(OverlapReport {
        ranges,
        intersection,
        inside_fraction,
        extrapolation_required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Observation;

    fn ds(g0: &[f64], g1: &[f64]) -> Dataset {
        let mut obs = Vec::new();
        for (i, &w) in g0.iter().enumerate() {
            obs.push(Observation::new(format!("a{i}"), Group::Zero, w, w).unwrap());
        }
        for (i, &w) in g1.iter().enumerate() {
            obs.push(Observation::new(format!("b{i}"), Group::One, w, w).unwrap());
        }
        Dataset::new(obs).unwrap()
    }

    #[test]
    fn partial_overlap() {
        let r = support_overlap(&ds(&[40.0, 45.0, 60.0], &[50.0, 55.0, 80.0])).unwrap();
        assert_eq!(r.intersection, Some(Range { min: 50.0, max: 60.0 }));
        assert_eq!(r.inside_fraction, [1.0 / 3.0, 2.0 / 3.0]);
        assert!(r.extrapolation_required);
    }

    #[test]
    fn identical_ranges() {
        let r = support_overlap(&ds(&[1.0, 2.0, 3.0], &[3.0, 1.0])).unwrap();
        assert_eq!(r.inside_fraction, [1.0, 1.0]);
        assert!(!r.extrapolation_required);
    }

    #[test]
    fn disjoint_ranges() {
        let r = support_overlap(&ds(&[1.0, 2.0], &[5.0, 6.0])).unwrap();
        assert_eq!(r.intersection, None);
        assert_eq!(r.inside_fraction, [0.0, 0.0]);
        assert!(r.extrapolation_required);
    }

    #[test]
    fn empty_group_is_an_error() {
        assert!(support_overlap(&ds(&[1.0], &[])).is_err());
    }
}
