//! Fairness Disagreement Index over a panel of normalized disparities.
//!
//! Two operationalizations are offered:
//!
//! - **continuous** (default): mean pairwise absolute difference of the
//!   disparities, `2 / (K (K - 1)) * sum_{i<j} |d_i - d_j|`.
//! - **verdict**: each metric gets a pass/fail verdict `d_k <= tau_k`; the
//!   index is the fraction of metric pairs whose verdicts disagree.
//!
//! Both are bounded in `[0, 1]` and vanish exactly when the panel agrees.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{DisparityGaps, GapMetric, DEFAULT_MIN_SUPPORT};

pub const DEFAULT_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdiMode {
    #[default]
    Continuous,
    Verdict,
}

impl fmt::Display for FdiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FdiMode::Continuous => "continuous",
            FdiMode::Verdict => "verdict",
        })
    }
}

impl FromStr for FdiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(FdiMode::Continuous),
            "verdict" => Ok(FdiMode::Verdict),
            other => Err(Error::config("fdi.mode", format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisparityPanel {
    entries: Vec<(String, f64)>,
    tolerances: BTreeMap<String, f64>,
}

impl DisparityPanel {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let entries: Vec<(String, f64)> = entries.into_iter().map(|(n, d)| (n.into(), d)).collect();
        if entries.len() < 2 {
            return Err(Error::InsufficientPanel(entries.len()));
        }
        let mut seen = HashSet::new();
        for (name, d) in &entries {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidPanel(format!("duplicate metric '{name}'")));
            }
            if !(0.0..=1.0).contains(d) {
                return Err(Error::InvalidPanel(format!(
                    "disparity for '{name}' is {d}, outside [0, 1]"
                )));
            }
        }
        Ok(DisparityPanel {
            entries,
            tolerances: BTreeMap::new(),
        })
    }

    pub fn with_tolerance(mut self, metric: impl Into<String>, tau: f64) -> Result<Self> {
        let metric = metric.into();
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidPanel(format!(
                "tolerance for '{metric}' is {tau}, outside [0, 1]"
            )));
        }
        self.tolerances.insert(metric, tau);
        Ok(self)
    }

    /// Applies the same tolerance to every metric in the panel.
    pub fn with_uniform_tolerance(self, tau: f64) -> Result<Self> {
        let names: Vec<String> = self.entries.iter().map(|(n, _)| n.clone()).collect();
        names.into_iter().try_fold(self, |p, n| p.with_tolerance(n, tau))
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn tolerance(&self, metric: &str) -> Option<f64> {
        self.tolerances.get(metric).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdiValue {
    pub value: f64,
    pub mode: FdiMode,
}

pub fn compute_fdi(panel: &DisparityPanel, mode: FdiMode) -> Result<FdiValue> {
    let k = panel.len();
    if k < 2 {
        return Err(Error::InsufficientPanel(k));
    }
    let pairs = (k * (k - 1) / 2) as f64;

    let value = match mode {
        FdiMode::Continuous => {
            // Sorted form of the pairwise sum: the gap between neighbours
            // d_(i) and d_(i+1) is crossed by (i+1)(k-1-i) pairs. Every term is
            // non-negative, so equal values give exactly zero.
            let mut d: Vec<f64> = panel.entries.iter().map(|(_, v)| *v).collect();
            d.sort_by(f64::total_cmp);
            let total: f64 = d
                .windows(2)
                .enumerate()
                .map(|(i, w)| ((i + 1) * (k - 1 - i)) as f64 * (w[1] - w[0]))
                .sum();
            total / pairs
        }
        FdiMode::Verdict => {
            let mut fair = 0usize;
            for (name, d) in &panel.entries {
                let tau = panel
                    .tolerance(name)
                    .ok_or_else(|| Error::MissingTolerance(name.clone()))?;
                if *d <= tau {
                    fair += 1;
                }
            }
            (fair * (k - fair)) as f64 / pairs
        }
    };

    Ok(FdiValue {
        value: value.clamp(0.0, 1.0),
        mode,
    })
}

/// Which gaps feed the FDI panel and how the index is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PanelConfig {
    pub metrics: Vec<GapMetric>,
    pub mode: FdiMode,
    pub default_tolerance: f64,
    /// Per-metric overrides of `default_tolerance`, keyed by gap name.
    pub tolerances: BTreeMap<String, f64>,
    pub min_support: u64,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig {
            metrics: GapMetric::ALL.to_vec(),
            mode: FdiMode::Continuous,
            default_tolerance: DEFAULT_TOLERANCE,
            tolerances: BTreeMap::new(),
            min_support: DEFAULT_MIN_SUPPORT,
        }
    }
}

impl PanelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.len() < 2 {
            return Err(Error::config("fdi.metrics", "need at least 2 metrics"));
        }
        let unique: HashSet<_> = self.metrics.iter().collect();
        if unique.len() != self.metrics.len() {
            return Err(Error::config("fdi.metrics", "duplicate metric"));
        }
        if !(0.0..=1.0).contains(&self.default_tolerance) {
            return Err(Error::config("fdi.default_tolerance", "must lie in [0, 1]"));
        }
        for (name, tau) in &self.tolerances {
            if GapMetric::from_name(name).is_none() {
                return Err(Error::config(
                    format!("fdi.tolerances.{name}"),
                    "unknown metric",
                ));
            }
            if !(0.0..=1.0).contains(tau) {
                return Err(Error::config(format!("fdi.tolerances.{name}"), "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn tolerance_for(&self, metric: GapMetric) -> f64 {
        self.tolerances
            .get(metric.name())
            .copied()
            .unwrap_or(self.default_tolerance)
    }

    pub fn panel(&self, gaps: &DisparityGaps) -> Result<DisparityPanel> {
        let mut panel = DisparityPanel::new(self.metrics.iter().map(|m| (m.name(), gaps.get(*m))))?;
        for m in &self.metrics {
            panel = panel.with_tolerance(m.name(), self.tolerance_for(*m))?;
        }
        Ok(panel)
    }

    pub fn fdi(&self, gaps: &DisparityGaps) -> Result<FdiValue> {
        compute_fdi(&self.panel(gaps)?, self.mode)
    }
}
