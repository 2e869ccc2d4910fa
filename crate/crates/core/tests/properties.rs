mod common;

use common::dataset;
use paradoxlens_core::decomposition::{compute_a1, compute_a2, SubgroupTable};
use paradoxlens_core::diagnostics::{dip_statistic, symmetry_test, variance_reduction_check};
use paradoxlens_core::ols::{fit, reverse_fit, DesignSpec, Term};
use paradoxlens_core::supermodel::{fit_submodel, gain_equivalence, prediction_improvement, upgrade};
use paradoxlens_core::{assign_bins, support_overlap, BinningSpec, Group, Variable};
use proptest::prelude::*;

fn group() -> impl Strategy<Value = Group> {
    prop_oneof![Just(Group::Zero), Just(Group::One)]
}

/// Rows with both groups present and a non-degenerate baseline in each.
fn rows(max: usize) -> impl Strategy<Value = Vec<(Group, f64, f64)>> {
    let row = (group(), -50.0..150.0f64, -50.0..150.0f64);
    (prop::collection::vec(row, 6..max), -50.0..150.0f64).prop_map(|(mut v, shift)| {
        v[0] = (Group::Zero, shift, shift + 1.0);
        v[1] = (Group::Zero, shift + 3.5, shift + 2.0);
        v[2] = (Group::One, shift + 1.25, shift - 1.0);
        v[3] = (Group::One, shift + 7.0, shift + 4.0);
        v
    })
}

fn binning() -> impl Strategy<Value = BinningSpec> {
    prop_oneof![
        (1usize..12).prop_map(|bins| BinningSpec::FixedWidth { bins }),
        (1usize..12).prop_map(|bins| BinningSpec::Quantile { bins }),
    ]
}

fn designs() -> Vec<DesignSpec> {
    vec![
        DesignSpec::group_means(Variable::WFinal),
        DesignSpec::ancova(Variable::WFinal),
        DesignSpec::ancova(Variable::Gain),
        DesignSpec::new(Variable::WFinal, vec![Term::Group0, Term::Group1, Term::W_INITIAL]).unwrap(),
        DesignSpec::new(Variable::Gain, vec![Term::Intercept, Term::W_INITIAL]).unwrap(),
    ]
}

fn scale(v: &[f64]) -> f64 {
    v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gain_is_exact_difference(rows in rows(40)) {
        let ds = dataset(&rows);
        for o in ds.observations() {
            prop_assert_eq!(o.gain(), o.w_final - o.w_initial);
            let ulp = f64::EPSILON * o.w_final.abs().max(o.w_initial.abs());
            prop_assert!((o.gain() + o.w_initial - o.w_final).abs() <= ulp);
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_design(rows in rows(60)) {
        let ds = dataset(&rows);
        for spec in designs() {
            let f = fit(&ds, &spec).unwrap();
            let ys = scale(&ds.values(spec.response));
            for c in spec.columns(&ds) {
                let dot: f64 = c.iter().zip(&f.residuals).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() <= 1e-8 * ds.len() as f64 * scale(&c) * ys, "dot {}", dot);
            }
        }
    }

    #[test]
    fn row_order_does_not_change_coefficients(rows in rows(60), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let ds = dataset(&rows);
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let other = dataset(&shuffled);
        for spec in designs() {
            let a = fit(&ds, &spec).unwrap();
            let b = fit(&other, &spec).unwrap();
            for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn adding_a_term_never_increases_sse(rows in rows(60)) {
        let ds = dataset(&rows);
        for resp in [Variable::WFinal, Variable::Gain] {
            let small = fit(&ds, &DesignSpec::group_means(resp)).unwrap();
            let big = fit(&ds, &DesignSpec::ancova(resp)).unwrap();
            prop_assert!(big.sse <= small.sse * (1.0 + 1e-12) + 1e-12);
            let tiny = fit(&ds, &DesignSpec::new(resp, vec![Term::Intercept]).unwrap()).unwrap();
            prop_assert!(small.sse <= tiny.sse * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn slope_product_is_r_squared(rows in rows(60)) {
        let ds = dataset(&rows);
        for (x, y) in [(Variable::WInitial, Variable::WFinal), (Variable::WInitial, Variable::Gain)] {
            let r = reverse_fit(&ds, x, y).unwrap();
            prop_assert!((r.slope_product - r.r_squared).abs() <= 1e-10);
        }
    }

    #[test]
    fn bins_partition_the_data(rows in rows(80), spec in binning()) {
        let ds = dataset(&rows);
        let a = assign_bins(&ds, &spec).unwrap();
        prop_assert_eq!(a.bins.len(), ds.len());
        prop_assert_eq!(a.sizes().iter().sum::<usize>(), ds.len());
        prop_assert!(a.bins.iter().all(|&b| b < a.num_bins()));
        prop_assert!(a.edges.windows(2).all(|w| w[0] < w[1]) || a.num_bins() == 1);
    }

    #[test]
    fn mixture_identity_and_weight_sums(rows in rows(80), spec in binning()) {
        let ds = dataset(&rows);
        let a = assign_bins(&ds, &spec).unwrap();
        let t = SubgroupTable::build(&ds, &a).unwrap();
        prop_assert!(t.mixture_error() <= 1e-12);
        for w in [t.bins.iter().map(|b| b.f1).sum::<f64>(), t.bins.iter().map(|b| b.f0).sum(), t.bins.iter().map(|b| b.f).sum()] {
            prop_assert!((w - 1.0).abs() <= 1e-12);
        }
        let n1 = t.bins.iter().map(|b| b.n1).sum::<usize>() as f64;
        prop_assert_eq!(t.alpha, n1 / ds.len() as f64);
    }

    #[test]
    fn own_weights_recover_a1(rows in rows(80), spec in binning()) {
        let ds = dataset(&rows);
        let a = assign_bins(&ds, &spec).unwrap();
        let t = SubgroupTable::build(&ds, &a).unwrap();
        let a1 = compute_a1(&ds).unwrap();
        prop_assert!((t.a1_from_own_weights() - a1).abs() <= 1e-12 * scale(&ds.values(Variable::Gain)));
    }

    #[test]
    fn confounding_effect_is_the_difference(rows in rows(80), spec in binning()) {
        let ds = dataset(&rows);
        if let Ok(d) = compute_a2(&ds, &spec) {
            prop_assert_eq!(d.confounding_effect, d.a2 - d.a1);
            prop_assert!(d.weight_divergence >= 0.0);
        }
    }

    #[test]
    fn single_bin_gives_a1(rows in rows(80)) {
        let ds = dataset(&rows);
        let d = compute_a2(&ds, &BinningSpec::Quantile { bins: 1 }).unwrap();
        prop_assert_eq!(d.a2, d.a1);
        prop_assert_eq!(d.weight_divergence, 0.0);
    }

    #[test]
    fn equal_baselines_collapse_a2_to_a1(
        base in prop::collection::vec(0.0..100.0f64, 3..30),
        gains in prop::collection::vec(-10.0..10.0f64, 60),
        spec in binning(),
    ) {
        // Both groups carry the same baseline values, so weights coincide.
        let mut rows = Vec::new();
        for (i, &w) in base.iter().enumerate() {
            rows.push((Group::Zero, w, w + gains[i]));
            rows.push((Group::One, w, w + gains[30 + i]));
        }
        let ds = dataset(&rows);
        let d = compute_a2(&ds, &spec).unwrap();
        prop_assert_eq!(d.weight_divergence, 0.0);
        prop_assert!((d.a2 - d.a1).abs() <= 1e-10);
    }

    #[test]
    fn widening_a_range_never_lowers_the_other_inside_fraction(rows in rows(60), stretch in 0.0..50.0f64) {
        let ds = dataset(&rows);
        let before = support_overlap(&ds).unwrap();
        let r = before.ranges[1];
        let mut wider = rows.clone();
        wider.push((Group::One, r.min - stretch, r.min));
        wider.push((Group::One, r.max + stretch, r.max));
        let after = support_overlap(&dataset(&wider)).unwrap();
        prop_assert!(after.inside_fraction[0] >= before.inside_fraction[0]);
    }

    #[test]
    fn composition_matches_direct_fit(rows in rows(80)) {
        let ds = dataset(&rows);
        let report = upgrade(&ds).unwrap();
        prop_assert!(report.relative_composition_delta <= 1e-8, "{:?}", report.deltas);
        prop_assert!(report.composition_within_tolerance);
        let sub = &report.submodel;
        let mu_g = ds.group_mean(Group::Zero, Variable::WFinal).unwrap();
        let mu_b = ds.group_mean(Group::One, Variable::WFinal).unwrap();
        let tol = 1e-10 * scale(&ds.values(Variable::WFinal));
        prop_assert!((sub.coefficients[0] - mu_g).abs() <= tol);
        prop_assert!((sub.coefficients[1] - (mu_b - mu_g)).abs() <= tol);
        let means = report.stage.group_means(&ds);
        prop_assert!(means.iter().all(|m| m.abs() <= tol), "{:?}", means);
        let sse = prediction_improvement(&ds, &report).unwrap();
        prop_assert!(sse.sse_super <= sse.sse_sub * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn gain_and_final_share_the_group_coefficient(rows in rows(80)) {
        let ds = dataset(&rows);
        let g = gain_equivalence(&ds).unwrap();
        prop_assert!(g.group_gap() <= 1e-10 * g.group_coef_final.abs().max(1.0));
        prop_assert!(g.slope_gap() <= 1e-10);
    }

    #[test]
    fn total_variance_bounds_the_binned_average(rows in rows(80), spec in binning()) {
        let ds = dataset(&rows);
        let sub = fit_submodel(&ds).unwrap();
        for v in variance_reduction_check(&ds, &sub, &spec).unwrap() {
            prop_assert!(v.reduced, "{:?}", v);
            prop_assert!(v.mixture_mean.abs() <= 1e-10 * scale(&ds.values(Variable::WFinal)));
        }
    }

    #[test]
    fn symmetry_p_ignores_affine_maps(
        v in prop::collection::vec(-10.0..10.0f64, 5..60),
        shift in -100.0..100.0f64,
        factor in 0.01..100.0f64,
        seed in any::<u64>(),
    ) {
        prop_assume!(v.iter().any(|x| (x - v[0]).abs() > 1e-3));
        let base = symmetry_test(&v, 199, seed).unwrap();
        let up: Vec<f64> = v.iter().map(|x| shift + factor * x).collect();
        let down: Vec<f64> = v.iter().map(|x| shift - factor * x).collect();
        let up = symmetry_test(&up, 199, seed).unwrap();
        let down = symmetry_test(&down, 199, seed).unwrap();
        prop_assert_eq!(base.p, up.p);
        prop_assert_eq!(base.p, down.p);
        prop_assert!((base.skewness - up.skewness).abs() <= 1e-8 * base.skewness.abs().max(1.0));
        prop_assert!((base.skewness + down.skewness).abs() <= 1e-8 * base.skewness.abs().max(1.0));
    }

    #[test]
    fn dip_ignores_affine_maps(
        v in prop::collection::vec(-10.0..10.0f64, 2..80),
        shift in -100.0..100.0f64,
        factor in 0.01..100.0f64,
    ) {
        let base = dip_statistic(&v);
        prop_assert!((0.0..=0.25).contains(&base));
        for sign in [1.0, -1.0] {
            let mapped: Vec<f64> = v.iter().map(|x| shift + sign * factor * x).collect();
            prop_assert!((dip_statistic(&mapped) - base).abs() <= 1e-9);
        }
    }
}

#[test]
fn forward_and_reverse_on_a_perfect_line() {
    let ds = dataset(&[
        (Group::Zero, 1.0, 3.0),
        (Group::Zero, 2.0, 5.0),
        (Group::One, 3.0, 7.0),
        (Group::One, 4.0, 9.0),
    ]);
    let r = reverse_fit(&ds, Variable::WInitial, Variable::WFinal).unwrap();
    assert!((r.slope_product - 1.0).abs() < 1e-12);
}
