//! Deployment Assurance Score, readiness classification, escalation level and
//! remediation progression.
//!
//! The score is the weighted aggregate
//!
//! ```text
//! DAS = alpha (1 - FDI) + beta (1 - dFPR) + gamma (1 - dFNR) + delta (1 - TSZ)
//! ```
//!
//! with the weights on the probability simplex. Readiness bands, escalation
//! severities and the failed-remediation bump are configurable.
//!
//! Some governance texts describe five escalation states (Monitored, Flagged,
//! Restricted, Escalated, Critical); the engine uses the four-level
//! Low/Moderate/High/Critical scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stability::ZoneLabel;

const SIMPLEX_TOL: f64 = 1e-9;

/// The four instability signals aggregated by the assurance score, plus the
/// context the escalation and lifecycle rules need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssuranceSignals {
    pub fdi: f64,
    pub delta_fpr: f64,
    pub delta_fnr: f64,
    pub tsz: f64,
    pub worst_zone: Option<ZoneLabel>,
    pub remediation_event: bool,
    /// Effectiveness of the most recent remediation; only meaningful when
    /// `remediation_event` is set.
    pub r_m: Option<f64>,
}

impl AssuranceSignals {
    pub fn new(fdi: f64, delta_fpr: f64, delta_fnr: f64, tsz: f64) -> Result<Self> {
        let s = AssuranceSignals {
            fdi,
            delta_fpr,
            delta_fnr,
            tsz,
            worst_zone: None,
            remediation_event: false,
            r_m: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Marks this snapshot as following a remediation with optional
    /// effectiveness `r_m`.
    pub fn with_remediation(mut self, r_m: Option<f64>) -> Result<Self> {
        self.remediation_event = true;
        self.r_m = r_m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_worst_zone(mut self, zone: ZoneLabel) -> Self {
        self.worst_zone = Some(zone);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("fdi", self.fdi),
            ("delta_fpr", self.delta_fpr),
            ("delta_fnr", self.delta_fnr),
            ("tsz", self.tsz),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSignals(format!("{name} = {v} outside [0, 1]")));
            }
        }
        match self.r_m {
            Some(_) if !self.remediation_event => Err(Error::InvalidSignals(
                "r_m given without a remediation event".into(),
            )),
            Some(r) if !(-1.0..=1.0).contains(&r) => {
                Err(Error::InvalidSignals(format!("r_m = {r} outside [-1, 1]")))
            }
            _ => Ok(()),
        }
    }

    fn failed_remediation(&self) -> bool {
        self.remediation_event && self.r_m.is_some_and(|r| r < 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightVector {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for WeightVector {
    fn default() -> Self {
        WeightVector {
            alpha: 0.25,
            beta: 0.25,
            gamma: 0.25,
            delta: 0.25,
        }
    }
}

impl WeightVector {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let w = WeightVector {
            alpha,
            beta,
            gamma,
            delta,
        };
        validate_weights(&w)?;
        Ok(w)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }
}

pub fn validate_weights(w: &WeightVector) -> Result<()> {
    for (name, value) in [("alpha", w.alpha), ("beta", w.beta), ("gamma", w.gamma), ("delta", w.delta)] {
        if !(value >= 0.0) {
            return Err(Error::NegativeWeight { name, value });
        }
    }
    let sum: f64 = w.as_array().iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::SumNotOne { sum });
    }
    Ok(())
}

pub fn compute_das(signals: &AssuranceSignals, w: &WeightVector) -> f64 {
    w.alpha * (1.0 - signals.fdi)
        + w.beta * (1.0 - signals.delta_fpr)
        + w.gamma * (1.0 - signals.delta_fnr)
        + w.delta * (1.0 - signals.tsz)
}

/// Deployment readiness, ordered by favorability: `BlockedDeployment` is the
/// least favorable and compares lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DeploymentState {
    BlockedDeployment,
    EscalatedGovernance,
    ReassessmentRequired,
    Restricted,
    Deployable,
}

impl DeploymentState {
    /// Most favorable first.
    pub const ALL: [DeploymentState; 5] = [
        DeploymentState::Deployable,
        DeploymentState::Restricted,
        DeploymentState::ReassessmentRequired,
        DeploymentState::EscalatedGovernance,
        DeploymentState::BlockedDeployment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DeploymentState::Deployable => "Deployable",
            DeploymentState::Restricted => "Restricted",
            DeploymentState::ReassessmentRequired => "ReassessmentRequired",
            DeploymentState::EscalatedGovernance => "EscalatedGovernance",
            DeploymentState::BlockedDeployment => "BlockedDeployment",
        }
    }

    /// 0 for `BlockedDeployment` up to 4 for `Deployable`.
    pub fn favorability(self) -> u8 {
        self as u8
    }

    pub fn one_level_up(self) -> Self {
        match self {
            DeploymentState::BlockedDeployment => DeploymentState::EscalatedGovernance,
            DeploymentState::EscalatedGovernance => DeploymentState::ReassessmentRequired,
            DeploymentState::ReassessmentRequired => DeploymentState::Restricted,
            DeploymentState::Restricted | DeploymentState::Deployable => DeploymentState::Deployable,
        }
    }

    pub fn one_level_down(self) -> Self {
        match self {
            DeploymentState::Deployable => DeploymentState::Restricted,
            DeploymentState::Restricted => DeploymentState::ReassessmentRequired,
            DeploymentState::ReassessmentRequired => DeploymentState::EscalatedGovernance,
            DeploymentState::EscalatedGovernance | DeploymentState::BlockedDeployment => {
                DeploymentState::BlockedDeployment
            }
        }
    }
}

impl fmt::Display for DeploymentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeploymentState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        DeploymentState::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown deployment state '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EscalationLevel {
    Low,
    Moderate,
    High,
    Critical,
}

impl EscalationLevel {
    pub fn from_severity(severity: u8) -> Self {
        match severity {
            0 => EscalationLevel::Low,
            1 => EscalationLevel::Moderate,
            2 => EscalationLevel::High,
            _ => EscalationLevel::Critical,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EscalationLevel::Low => "Low",
            EscalationLevel::Moderate => "Moderate",
            EscalationLevel::High => "High",
            EscalationLevel::Critical => "Critical",
        }
    }
}

impl fmt::Display for EscalationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lower DAS boundaries of the four non-blocked readiness states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrcBands {
    pub deployable: f64,
    pub restricted: f64,
    pub reassessment: f64,
    pub escalated: f64,
}

impl Default for DrcBands {
    fn default() -> Self {
        DrcBands {
            deployable: 0.85,
            restricted: 0.65,
            reassessment: 0.50,
            escalated: 0.30,
        }
    }
}

impl DrcBands {
    pub fn validate(&self) -> Result<()> {
        let b = [self.deployable, self.restricted, self.reassessment, self.escalated];
        let ok = b[0] < 1.0 && b.windows(2).all(|w| w[0] > w[1]) && b[3] > 0.0;
        if !ok {
            return Err(Error::config(
                "bands",
                format!("need 1 > deployable > restricted > reassessment > escalated > 0, got {b:?}"),
            ));
        }
        Ok(())
    }

    /// Lowest DAS that still classifies as `state`.
    pub fn lower_bound(&self, state: DeploymentState) -> f64 {
        match state {
            DeploymentState::Deployable => self.deployable,
            DeploymentState::Restricted => self.restricted,
            DeploymentState::ReassessmentRequired => self.reassessment,
            DeploymentState::EscalatedGovernance => self.escalated,
            DeploymentState::BlockedDeployment => 0.0,
        }
    }
}

/// Band lookup (closed below) followed by the fragility cap: a
/// `GovernanceFragility` zone never classifies above `EscalatedGovernance`.
pub fn classify_drc(das: f64, bands: &DrcBands, worst_zone: Option<ZoneLabel>) -> DeploymentState {
    let by_band = if das >= bands.deployable {
        DeploymentState::Deployable
    } else if das >= bands.restricted {
        DeploymentState::Restricted
    } else if das >= bands.reassessment {
        DeploymentState::ReassessmentRequired
    } else if das >= bands.escalated {
        DeploymentState::EscalatedGovernance
    } else {
        DeploymentState::BlockedDeployment
    };
    if worst_zone == Some(ZoneLabel::GovernanceFragility) {
        by_band.min(DeploymentState::EscalatedGovernance)
    } else {
        by_band
    }
}

/// Severity cut points per signal: a value below `cuts[0]` is severity 0,
/// below `cuts[1]` severity 1, below `cuts[2]` severity 2, otherwise 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GesThresholds {
    pub fdi: [f64; 3],
    pub delta_fpr: [f64; 3],
    pub delta_fnr: [f64; 3],
    pub tsz: [f64; 3],
}

impl Default for GesThresholds {
    fn default() -> Self {
        GesThresholds {
            fdi: [0.25, 0.5, 0.75],
            delta_fpr: [0.15, 0.35, 0.7],
            delta_fnr: [0.15, 0.35, 0.7],
            tsz: [0.2, 0.4, 0.7],
        }
    }
}

impl GesThresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, cuts) in [
            ("fdi", self.fdi),
            ("delta_fpr", self.delta_fpr),
            ("delta_fnr", self.delta_fnr),
            ("tsz", self.tsz),
        ] {
            if !(cuts[0] < cuts[1] && cuts[1] < cuts[2]) || cuts.iter().any(|c| !c.is_finite()) {
                return Err(Error::config(
                    format!("ges.{name}"),
                    format!("cut points must be strictly increasing, got {cuts:?}"),
                ));
            }
        }
        Ok(())
    }
}

fn severity(value: f64, cuts: &[f64; 3]) -> u8 {
    cuts.iter().take_while(|c| value >= **c).count() as u8
}

/// Maximum per-signal severity, raised one step (capped at `Critical`) after a
/// failed remediation (`r_m < 0`).
pub fn compute_ges(signals: &AssuranceSignals, thresholds: &GesThresholds) -> EscalationLevel {
    let base = [
        severity(signals.fdi, &thresholds.fdi),
        severity(signals.delta_fpr, &thresholds.delta_fpr),
        severity(signals.delta_fnr, &thresholds.delta_fnr),
        severity(signals.tsz, &thresholds.tsz),
    ]
    .into_iter()
    .max()
    .unwrap_or(0);
    let bump = u8::from(signals.failed_remediation());
    EscalationLevel::from_severity((base + bump).min(3))
}

/// Change in assurance across an intervention: `das_next - das_prev`.
pub fn remediation_progression(das_prev: f64, das_next: f64) -> f64 {
    das_next - das_prev
}
