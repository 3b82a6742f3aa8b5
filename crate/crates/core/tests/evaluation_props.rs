use std::collections::BTreeMap;

use deployment_assurance::prelude::*;
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = Vec<Sample>> {
    prop::collection::vec((0.0f64..=1.0, 0u8..=1, 0usize..4), 1..120).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (score, label, g))| Sample::new(format!("s{i}"), score, label, format!("g{g}")).unwrap())
            .collect()
    })
}

/// Datasets where every subgroup has both classes and at least `per` samples.
fn supported_dataset(per: usize) -> impl Strategy<Value = Vec<Sample>> {
    prop::collection::vec(prop::collection::vec(0.0f64..=1.0, per * 2..per * 3), 2..4).prop_map(|groups| {
        groups
            .into_iter()
            .enumerate()
            .flat_map(|(g, scores)| {
                scores
                    .into_iter()
                    .enumerate()
                    .map(move |(i, s)| Sample::new(format!("g{g}-{i}"), s, (i % 2) as u8, format!("g{g}")).unwrap())
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn cells_sum_to_subgroup_size(samples in dataset(), t in 0.0f64..=1.0) {
        let counts = compute_confusion(&samples, t).unwrap();
        let mut sizes: BTreeMap<&str, u64> = BTreeMap::new();
        for s in &samples {
            *sizes.entry(s.subgroup.as_str()).or_default() += 1;
        }
        for (g, c) in &counts {
            prop_assert_eq!(c.true_pos + c.false_pos + c.true_neg + c.false_neg, sizes[g.as_str()]);
        }
        prop_assert_eq!(counts.values().map(|c| c.total()).sum::<u64>(), samples.len() as u64);
    }

    #[test]
    fn rates_are_finite_or_undefined(samples in dataset(), t in 0.0f64..=1.0) {
        for c in compute_confusion(&samples, t).unwrap().values() {
            let r = compute_rates(c);
            for m in GapMetric::ALL {
                if let Some(v) = r.get(m) {
                    prop_assert!(v.is_finite() && (0.0..=1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn selection_rate_falls_as_threshold_rises(samples in dataset(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let at_lo = compute_confusion(&samples, lo).unwrap();
        let at_hi = compute_confusion(&samples, hi).unwrap();
        for (g, c) in &at_lo {
            let sr_lo = compute_rates(c).selection_rate.unwrap();
            let sr_hi = compute_rates(&at_hi[g]).selection_rate.unwrap();
            prop_assert!(sr_hi <= sr_lo);
        }
    }

    #[test]
    fn gaps_ignore_subgroup_names_and_order(samples in supported_dataset(15), t in 0.0f64..=1.0, seed in any::<u64>()) {
        let base = evaluate(&samples, t, 30).unwrap().gaps;

        let renamed: Vec<Sample> = samples
            .iter()
            .map(|s| Sample { subgroup: format!("renamed-{}", s.subgroup), ..s.clone() })
            .collect();
        let mut shuffled = renamed.clone();
        let n = shuffled.len();
        for i in 0..n {
            let j = (seed.wrapping_mul(i as u64 + 1).rotate_left(17) % n as u64) as usize;
            shuffled.swap(i, j);
        }
        let other = evaluate(&shuffled, t, 30).unwrap().gaps;
        for m in GapMetric::ALL {
            prop_assert_eq!(base.get(m), other.get(m));
        }
    }

    #[test]
    fn gaps_lie_in_unit_interval(samples in supported_dataset(15), t in 0.0f64..=1.0) {
        let report = evaluate(&samples, t, 30).unwrap();
        for m in GapMetric::ALL {
            let g = report.gaps.get(m);
            prop_assert!(g.is_finite() && (0.0..=1.0).contains(&g));
        }
        prop_assert!(report.mean_fpr.is_finite() && report.mean_fnr.is_finite());
    }
}

#[test]
fn one_class_subgroup_is_excluded_not_nan() {
    let mut samples = Vec::new();
    for i in 0..40 {
        samples.push(Sample::new(format!("a{i}"), i as f64 / 40.0, (i % 2) as u8, "a").unwrap());
        samples.push(Sample::new(format!("b{i}"), i as f64 / 40.0, (i % 2) as u8, "b").unwrap());
        samples.push(Sample::new(format!("c{i}"), i as f64 / 40.0, 1, "c").unwrap());
    }
    let report = evaluate(&samples, 0.5, 30).unwrap();
    assert!(report.gaps.delta_fpr.is_finite());
    assert!(report
        .gaps
        .excluded_subgroups
        .iter()
        .any(|e| e.subgroup == "c" && e.metric == GapMetric::Fpr && e.reason.as_str() == "undefined_rate"));
}
