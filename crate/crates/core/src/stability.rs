//! Threshold sweeps, FDI sensitivity `|dFDI/dt|`, stability zones and the
//! scalar TSZ signal consumed by the assurance score.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disagreement::PanelConfig;
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, Sample};

const SPACING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ZoneLabel {
    Stable,
    Sensitive,
    AmplifiedDisagreement,
    GovernanceFragility,
}

impl ZoneLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ZoneLabel::Stable => "Stable",
            ZoneLabel::Sensitive => "Sensitive",
            ZoneLabel::AmplifiedDisagreement => "AmplifiedDisagreement",
            ZoneLabel::GovernanceFragility => "GovernanceFragility",
        }
    }
}

impl fmt::Display for ZoneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ZoneLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            ZoneLabel::Stable,
            ZoneLabel::Sensitive,
            ZoneLabel::AmplifiedDisagreement,
            ZoneLabel::GovernanceFragility,
        ]
        .into_iter()
        .find(|z| z.as_str() == s)
        .ok_or_else(|| format!("unknown zone '{s}'"))
    }
}

/// Lower edges of the Sensitive, AmplifiedDisagreement and GovernanceFragility
/// zones, in FDI per unit threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoneConfig {
    pub sensitive: f64,
    pub amplified: f64,
    pub fragility: f64,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        ZoneConfig {
            sensitive: 0.25,
            amplified: 0.75,
            fragility: 1.5,
        }
    }
}

impl ZoneConfig {
    pub fn validate(&self) -> Result<()> {
        let z = [self.sensitive, self.amplified, self.fragility];
        if z.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::config("zones", "boundaries must be finite and positive"));
        }
        if !(z[0] < z[1] && z[1] < z[2]) {
            return Err(Error::config(
                "zones",
                format!("boundaries must be strictly increasing, got {z:?}"),
            ));
        }
        Ok(())
    }
}

pub fn classify_zone(s: f64, config: &ZoneConfig) -> Result<ZoneLabel> {
    config.validate()?;
    if !(s >= 0.0) {
        return Err(Error::InvalidProfile(format!("sensitivity {s} is negative or NaN")));
    }
    Ok(if s < config.sensitive {
        ZoneLabel::Stable
    } else if s < config.amplified {
        ZoneLabel::Sensitive
    } else if s < config.fragility {
        ZoneLabel::AmplifiedDisagreement
    } else {
        ZoneLabel::GovernanceFragility
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub threshold: f64,
    pub fdi: f64,
    /// True when the point lacked eligible subgroups and was filled in from
    /// its neighbours.
    pub interpolated: bool,
}

/// FDI sampled on a uniform threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdiProfile {
    points: Vec<ProfilePoint>,
    step: f64,
}

impl FdiProfile {
    pub fn new(points: Vec<ProfilePoint>, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidProfile(format!("step {step} must be positive")));
        }
        if points.len() < 3 {
            return Err(Error::InvalidProfile(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        for w in points.windows(2) {
            let gap = w[1].threshold - w[0].threshold;
            if (gap - step).abs() > SPACING_TOL {
                return Err(Error::InvalidProfile(format!(
                    "thresholds {} and {} are not spaced by {step}",
                    w[0].threshold, w[1].threshold
                )));
            }
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.fdi)) {
            return Err(Error::InvalidProfile(format!(
                "fdi {} at t={} outside [0, 1]",
                p.fdi, p.threshold
            )));
        }
        Ok(FdiProfile { points, step })
    }

    /// Samples `f` at `start + i * step` for `i in 0..n`.
    pub fn from_fn(start: f64, step: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let points = (0..n)
            .map(|i| {
                let t = start + i as f64 * step;
                ProfilePoint {
                    threshold: t,
                    fdi: f(t),
                    interpolated: false,
                }
            })
            .collect();
        FdiProfile::new(points, step)
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// Threshold grid for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepRange {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl Default for SweepRange {
    fn default() -> Self {
        SweepRange {
            t_min: 0.20,
            t_max: 0.90,
            step: 0.05,
        }
    }
}

impl SweepRange {
    pub fn validate(&self) -> Result<()> {
        let SweepRange { t_min, t_max, step } = *self;
        if !(0.0 <= t_min && t_min < t_max && t_max <= 1.0) {
            return Err(Error::InvalidRange(format!(
                "need 0 <= t_min < t_max <= 1, got {t_min}..{t_max}"
            )));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidRange(format!("step {step} must be positive")));
        }
        if (t_max - t_min) / step < 2.0 - SPACING_TOL {
            return Err(Error::InvalidRange(format!(
                "range {t_min}..{t_max} holds fewer than 3 points at step {step}"
            )));
        }
        Ok(())
    }

    /// Grid thresholds `t_min + i * step` up to `t_max` (inclusive within 1e-9).
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let intervals = ((self.t_max - self.t_min) / self.step + SPACING_TOL).floor() as usize;
        Ok((0..=intervals)
            .map(|i| (self.t_min + i as f64 * self.step).min(1.0))
            .collect())
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    /// Parses `MIN:MAX:STEP`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidRange(format!("expected MIN:MAX:STEP, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let range = SweepRange {
            t_min: nums[0],
            t_max: nums[1],
            step: nums[2],
        };
        range.validate()?;
        Ok(range)
    }
}

/// Evaluates FDI at every grid threshold. Points where some gap lacks two
/// eligible subgroups are flagged and linearly interpolated from the nearest
/// valid neighbours; more than half flagged is an error.
pub fn sweep(samples: &[Sample], range: &SweepRange, panel: &PanelConfig) -> Result<FdiProfile> {
    let grid = range.grid()?;
    panel.validate()?;

    let mut values: Vec<Option<f64>> = Vec::with_capacity(grid.len());
    for &t in &grid {
        match evaluate(samples, t, panel.min_support) {
            Ok(report) => values.push(Some(panel.fdi(&report.gaps)?.value)),
            Err(Error::InsufficientSubgroups { .. }) => values.push(None),
            Err(e) => return Err(e),
        }
    }

    let flagged = values.iter().filter(|v| v.is_none()).count();
    if 2 * flagged > grid.len() {
        return Err(Error::SweepDegenerate {
            flagged,
            total: grid.len(),
        });
    }

    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| ProfilePoint {
            threshold: t,
            fdi: values[i].unwrap_or_else(|| interpolate(&grid, &values, i)),
            interpolated: values[i].is_none(),
        })
        .collect();
    FdiProfile::new(points, range.step)
}

fn interpolate(grid: &[f64], values: &[Option<f64>], i: usize) -> f64 {
    let left = (0..i).rev().find_map(|j| values[j].map(|v| (grid[j], v)));
    let right = (i + 1..values.len()).find_map(|j| values[j].map(|v| (grid[j], v)));
    match (left, right) {
        (Some((t0, v0)), Some((t1, v1))) => v0 + (v1 - v0) * (grid[i] - t0) / (t1 - t0),
        (Some((_, v)), None) | (None, Some((_, v))) => v,
        // unreachable when fewer than half the points are flagged
        (None, None) => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub threshold: f64,
    pub sensitivity: f64,
    pub zone: ZoneLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityProfile {
    pub points: Vec<SensitivityPoint>,
}

impl SensitivityProfile {
    pub fn worst_zone(&self) -> Option<ZoneLabel> {
        self.points.iter().map(|p| p.zone).max()
    }
}

/// `|dFDI/dt|` by central differences at interior points and one-sided
/// differences at the two ends.
pub fn sensitivity(profile: &FdiProfile, zones: &ZoneConfig) -> Result<SensitivityProfile> {
    zones.validate()?;
    let pts = profile.points();
    let h = profile.step();
    let last = pts.len() - 1;

    let points = (0..pts.len())
        .map(|i| {
            let s = if i == 0 {
                (pts[1].fdi - pts[0].fdi).abs() / h
            } else if i == last {
                (pts[last].fdi - pts[last - 1].fdi).abs() / h
            } else {
                (pts[i + 1].fdi - pts[i - 1].fdi).abs() / (2.0 * h)
            };
            Ok(SensitivityPoint {
                threshold: pts[i].threshold,
                sensitivity: s,
                zone: classify_zone(s, zones)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SensitivityProfile { points })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Mean,
    Max,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Mean => "mean",
            Aggregation::Max => "max",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TszScalar {
    pub value: f64,
    pub aggregation: Aggregation,
    pub s_ref: f64,
}

pub const DEFAULT_S_REF: f64 = 2.0;

/// `clip(aggregate(s) / s_ref, 0, 1)`.
pub fn tsz_scalar(sens: &SensitivityProfile, aggregation: Aggregation, s_ref: f64) -> Result<TszScalar> {
    if !(s_ref > 0.0 && s_ref.is_finite()) {
        return Err(Error::config("tsz.s_ref", format!("must be positive, got {s_ref}")));
    }
    if sens.points.is_empty() {
        return Err(Error::InvalidProfile("empty sensitivity profile".into()));
    }
    let s = sens.points.iter().map(|p| p.sensitivity);
    let agg = match aggregation {
        Aggregation::Mean => s.sum::<f64>() / sens.points.len() as f64,
        Aggregation::Max => s.fold(0.0, f64::max),
    };
    Ok(TszScalar {
        value: (agg / s_ref).clamp(0.0, 1.0),
        aggregation,
        s_ref,
    })
}
