//! Per-subgroup confusion counts, rate panels and cross-subgroup disparity gaps.
//!
//! The decision rule throughout is `score >= threshold` (closed at the
//! threshold), so `t = 0` predicts every sample positive.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Subgroups with fewer samples than this are left out of gap computation.
pub const DEFAULT_MIN_SUPPORT: u64 = 30;

/// One scored, labeled sample belonging to a subgroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sample_id: String,
    pub score: f64,
    pub label: u8,
    pub subgroup: String,
}

impl Sample {
    pub fn new(
        sample_id: impl Into<String>,
        score: f64,
        label: u8,
        subgroup: impl Into<String>,
    ) -> Result<Self> {
        let sample = Sample {
            sample_id: sample_id.into(),
            score,
            label,
            subgroup: subgroup.into(),
        };
        sample.validate()?;
        Ok(sample)
    }

    pub fn validate(&self) -> Result<()> {
        let reason = if !(0.0..=1.0).contains(&self.score) {
            format!("score {} outside [0, 1]", self.score)
        } else if self.label > 1 {
            format!("label {} not in {{0, 1}}", self.label)
        } else if self.subgroup.is_empty() {
            "empty subgroup".to_string()
        } else {
            return Ok(());
        };
        Err(Error::MalformedSample {
            sample_id: self.sample_id.clone(),
            reason,
        })
    }

    #[inline]
    pub fn predicted_positive(&self, threshold: f64) -> bool {
        self.score >= threshold
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    fn record(&mut self, predicted: bool, label: u8) {
        match (predicted, label == 1) {
            (true, true) => self.true_pos += 1,
            (true, false) => self.false_pos += 1,
            (false, false) => self.true_neg += 1,
            (false, true) => self.false_neg += 1,
        }
    }
}

/// Standard error/selection rates for one subgroup. `None` marks a rate whose
/// denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RatePanel {
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
    pub tpr: Option<f64>,
    pub selection_rate: Option<f64>,
}

impl RatePanel {
    pub fn get(&self, metric: GapMetric) -> Option<f64> {
        match metric {
            GapMetric::Fpr => self.fpr,
            GapMetric::Fnr => self.fnr,
            GapMetric::Tpr => self.tpr,
            GapMetric::SelectionRate => self.selection_rate,
        }
    }
}

/// The rate a disparity gap is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMetric {
    #[serde(rename = "delta_fpr")]
    Fpr,
    #[serde(rename = "delta_fnr")]
    Fnr,
    #[serde(rename = "delta_tpr")]
    Tpr,
    #[serde(rename = "delta_sr")]
    SelectionRate,
}

impl GapMetric {
    pub const ALL: [GapMetric; 4] = [
        GapMetric::Fpr,
        GapMetric::Fnr,
        GapMetric::Tpr,
        GapMetric::SelectionRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GapMetric::Fpr => "delta_fpr",
            GapMetric::Fnr => "delta_fnr",
            GapMetric::Tpr => "delta_tpr",
            GapMetric::SelectionRate => "delta_sr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        GapMetric::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl fmt::Display for GapMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    BelowSupport,
    UndefinedRate,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::BelowSupport => "below_support",
            ExclusionReason::UndefinedRate => "undefined_rate",
        }
    }
}

/// A subgroup left out of one gap computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub subgroup: String,
    pub metric: GapMetric,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityGaps {
    pub delta_fpr: f64,
    pub delta_fnr: f64,
    pub delta_tpr: f64,
    pub delta_sr: f64,
    pub excluded_subgroups: Vec<Exclusion>,
}

impl DisparityGaps {
    pub fn get(&self, metric: GapMetric) -> f64 {
        match metric {
            GapMetric::Fpr => self.delta_fpr,
            GapMetric::Fnr => self.delta_fnr,
            GapMetric::Tpr => self.delta_tpr,
            GapMetric::SelectionRate => self.delta_sr,
        }
    }
}

/// Counts every sample into its subgroup's confusion matrix at `threshold`.
pub fn compute_confusion(
    samples: &[Sample],
    threshold: f64,
) -> Result<BTreeMap<String, ConfusionCounts>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidRange(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let mut out: BTreeMap<String, ConfusionCounts> = BTreeMap::new();
    for sample in samples {
        sample.validate()?;
        out.entry(sample.subgroup.clone())
            .or_default()
            .record(sample.predicted_positive(threshold), sample.label);
    }
    Ok(out)
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_rates(counts: &ConfusionCounts) -> RatePanel {
    let c = counts;
    RatePanel {
        fpr: ratio(c.false_pos, c.false_pos + c.true_neg),
        fnr: ratio(c.false_neg, c.false_neg + c.true_pos),
        tpr: ratio(c.true_pos, c.true_pos + c.false_neg),
        selection_rate: ratio(c.true_pos + c.false_pos, c.total()),
    }
}

/// Max minus min of each rate over the subgroups that have at least
/// `min_support` samples and a defined rate. A subgroup with an undefined
/// rate is dropped from that gap only.
pub fn compute_gaps(
    rates: &BTreeMap<String, RatePanel>,
    counts: &BTreeMap<String, u64>,
    min_support: u64,
) -> Result<DisparityGaps> {
    let mut excluded = Vec::new();
    let mut values = [0.0; 4];

    for (slot, metric) in GapMetric::ALL.into_iter().enumerate() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut eligible = 0usize;

        for (subgroup, panel) in rates {
            let n = counts.get(subgroup).copied().unwrap_or(0);
            let reason = match (n >= min_support, panel.get(metric)) {
                (true, Some(v)) => {
                    eligible += 1;
                    lo = lo.min(v);
                    hi = hi.max(v);
                    continue;
                }
                (false, _) => ExclusionReason::BelowSupport,
                (true, None) => ExclusionReason::UndefinedRate,
            };
            excluded.push(Exclusion {
                subgroup: subgroup.clone(),
                metric,
                reason,
            });
        }

        if eligible < 2 {
            return Err(Error::InsufficientSubgroups {
                gap: metric.name(),
                eligible,
                excluded,
            });
        }
        values[slot] = hi - lo;
    }

    Ok(DisparityGaps {
        delta_fpr: values[0],
        delta_fnr: values[1],
        delta_tpr: values[2],
        delta_sr: values[3],
        excluded_subgroups: excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupReport {
    pub subgroup: String,
    pub counts: ConfusionCounts,
    pub rates: RatePanel,
}

/// Everything evaluation-core produces for one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub threshold: f64,
    pub subgroups: Vec<SubgroupReport>,
    pub gaps: DisparityGaps,
    /// Macro (per-subgroup) average over the subgroups eligible for the FPR gap.
    pub mean_fpr: f64,
    /// Macro average over the subgroups eligible for the FNR gap.
    pub mean_fnr: f64,
}

pub fn evaluate(samples: &[Sample], threshold: f64, min_support: u64) -> Result<EvaluationReport> {
    let confusion = compute_confusion(samples, threshold)?;
    let rates: BTreeMap<String, RatePanel> = confusion
        .iter()
        .map(|(g, c)| (g.clone(), compute_rates(c)))
        .collect();
    let totals: BTreeMap<String, u64> = confusion.iter().map(|(g, c)| (g.clone(), c.total())).collect();
    let gaps = compute_gaps(&rates, &totals, min_support)?;

    let macro_mean = |metric: GapMetric| {
        let vals: Vec<f64> = rates
            .iter()
            .filter(|(g, _)| totals[*g] >= min_support)
            .filter_map(|(_, p)| p.get(metric))
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };

    Ok(EvaluationReport {
        threshold,
        mean_fpr: macro_mean(GapMetric::Fpr),
        mean_fnr: macro_mean(GapMetric::Fnr),
        subgroups: confusion
            .iter()
            .map(|(g, c)| SubgroupReport {
                subgroup: g.clone(),
                counts: *c,
                rates: rates[g],
            })
            .collect(),
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> Vec<Sample> {
        vec![
            Sample::new("a1", 0.9, 1, "A").unwrap(),
            Sample::new("a2", 0.1, 0, "A").unwrap(),
            Sample::new("b1", 0.8, 0, "B").unwrap(),
            Sample::new("b2", 0.3, 1, "B").unwrap(),
        ]
    }

    fn counts(tp: u64, fp: u64, tn: u64, fneg: u64) -> ConfusionCounts {
        ConfusionCounts {
            true_pos: tp,
            false_pos: fp,
            true_neg: tn,
            false_neg: fneg,
        }
    }

    #[test]
    fn hand_counted_confusion() {
        let c = compute_confusion(&four(), 0.5).unwrap();
        assert_eq!(c["A"], counts(1, 0, 1, 0));
        assert_eq!(c["B"], counts(0, 1, 0, 1));
    }

    #[test]
    fn high_threshold_predicts_all_negative() {
        let c = compute_confusion(&four(), 0.95).unwrap();
        assert_eq!(c["A"], counts(0, 0, 1, 1));
        assert_eq!(c["B"], counts(0, 0, 1, 1));
    }

    #[test]
    fn threshold_is_closed() {
        let s = vec![Sample::new("x", 0.5, 1, "A").unwrap()];
        assert_eq!(compute_confusion(&s, 0.5).unwrap()["A"].true_pos, 1);
        assert_eq!(compute_confusion(&s, 0.0).unwrap()["A"].true_pos, 1);
    }

    #[test]
    fn empty_and_malformed() {
        assert!(matches!(compute_confusion(&[], 0.5), Err(Error::EmptyInput)));
        let bad = vec![Sample {
            sample_id: "s9".into(),
            score: 1.5,
            label: 1,
            subgroup: "A".into(),
        }];
        match compute_confusion(&bad, 0.5) {
            Err(Error::MalformedSample { sample_id, .. }) => assert_eq!(sample_id, "s9"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_label = Sample {
            sample_id: "s3".into(),
            score: 0.5,
            label: 2,
            subgroup: "A".into(),
        };
        assert!(bad_label.validate().is_err());
        assert!(Sample::new("s4", 0.5, 0, "").is_err());
    }

    #[test]
    fn rates_from_counts() {
        let r = compute_rates(&counts(1, 0, 1, 0));
        assert_eq!(r.fpr, Some(0.0));
        assert_eq!(r.fnr, Some(0.0));
        assert_eq!(r.tpr, Some(1.0));
        assert_eq!(r.selection_rate, Some(0.5));

        assert_eq!(compute_rates(&counts(0, 0, 0, 0)), RatePanel::default());

        let r = compute_rates(&counts(0, 0, 2, 0));
        assert_eq!(r.fpr, Some(0.0));
        assert_eq!(r.fnr, None);
        assert_eq!(r.tpr, None);
        assert_eq!(r.selection_rate, Some(0.0));
    }

    fn panel(fpr: f64) -> RatePanel {
        RatePanel {
            fpr: Some(fpr),
            fnr: Some(0.5),
            tpr: Some(0.5),
            selection_rate: Some(0.5),
        }
    }

    #[test]
    fn fpr_gap_is_max_minus_min() {
        let rates = BTreeMap::from([("A".to_string(), panel(0.10)), ("B".to_string(), panel(0.4043))]);
        let n = BTreeMap::from([("A".to_string(), 100), ("B".to_string(), 100)]);
        let gaps = compute_gaps(&rates, &n, 30).unwrap();
        assert!((gaps.delta_fpr - 0.3043).abs() < 1e-12);
        assert_eq!(gaps.delta_fnr, 0.0);
        assert!(gaps.excluded_subgroups.is_empty());
    }

    #[test]
    fn identical_rates_give_zero_gap() {
        let rates: BTreeMap<_, _> = ["A", "B", "C"].iter().map(|g| (g.to_string(), panel(0.2))).collect();
        let n: BTreeMap<_, _> = ["A", "B", "C"].iter().map(|g| (g.to_string(), 50)).collect();
        assert_eq!(compute_gaps(&rates, &n, 30).unwrap().delta_fpr, 0.0);
    }

    #[test]
    fn below_support_excluded() {
        let rates = BTreeMap::from([("A".to_string(), panel(0.1)), ("B".to_string(), panel(0.9))]);
        let n = BTreeMap::from([("A".to_string(), 100), ("B".to_string(), 5)]);
        match compute_gaps(&rates, &n, 30) {
            Err(Error::InsufficientSubgroups { gap, eligible, excluded }) => {
                assert_eq!(gap, "delta_fpr");
                assert_eq!(eligible, 1);
                assert_eq!(excluded.len(), 1);
                assert_eq!(excluded[0].subgroup, "B");
                assert_eq!(excluded[0].reason, ExclusionReason::BelowSupport);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undefined_rate_excludes_from_that_gap_only() {
        let mut c = panel(0.3);
        c.fnr = None;
        c.tpr = None;
        let rates = BTreeMap::from([
            ("A".to_string(), panel(0.1)),
            ("B".to_string(), panel(0.2)),
            ("C".to_string(), c),
        ]);
        let n: BTreeMap<_, _> = rates.keys().map(|g| (g.clone(), 40)).collect();
        let gaps = compute_gaps(&rates, &n, 30).unwrap();
        assert!((gaps.delta_fpr - 0.2).abs() < 1e-12);
        let undefined: Vec<_> = gaps
            .excluded_subgroups
            .iter()
            .map(|e| (e.subgroup.as_str(), e.metric, e.reason))
            .collect();
        assert_eq!(
            undefined,
            vec![
                ("C", GapMetric::Fnr, ExclusionReason::UndefinedRate),
                ("C", GapMetric::Tpr, ExclusionReason::UndefinedRate),
            ]
        );
    }

    #[test]
    fn report_uses_macro_means() {
        let mut samples = Vec::new();
        for i in 0..40 {
            // A: 20 negatives, 5 of them scored high; 20 positives all scored high.
            let (score, label) = if i < 20 { (if i < 5 { 0.9 } else { 0.1 }, 0) } else { (0.9, 1) };
            samples.push(Sample::new(format!("a{i}"), score, label, "A").unwrap());
            // B: no false positives, half the positives missed.
            let (score, label) = if i < 20 { (0.1, 0) } else { (if i < 30 { 0.1 } else { 0.9 }, 1) };
            samples.push(Sample::new(format!("b{i}"), score, label, "B").unwrap());
        }
        let report = evaluate(&samples, 0.5, 30).unwrap();
        assert!((report.mean_fpr - 0.125).abs() < 1e-12);
        assert!((report.mean_fnr - 0.25).abs() < 1e-12);
        assert!((report.gaps.delta_fpr - 0.25).abs() < 1e-12);
        assert!((report.gaps.delta_fnr - 0.5).abs() < 1e-12);
        assert_eq!(report.gaps.delta_fnr, report.gaps.delta_tpr);
    }
}
