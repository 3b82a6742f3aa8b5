//! Governance-state machine over an ordered sequence of snapshot assessments.
//!
//! Transition rules:
//!
//! - the target state is the stateless readiness class (bands plus the
//!   fragility cap);
//! - degradations are adopted immediately;
//! - recoveries require a remediation event and a DAS at least `hysteresis`
//!   above the destination band's lower boundary; with recovery gating on a
//!   step climbs at most one level, and leaving `BlockedDeployment` never lands
//!   above `ReassessmentRequired`.

use serde::{Deserialize, Serialize};

use crate::assurance::{
    classify_drc, compute_das, compute_ges, remediation_progression, AssuranceSignals,
    DeploymentState, DrcBands, EscalationLevel,
};
use crate::config::{fingerprint_of, EngineConfig};
use crate::error::{Error, Result};
use crate::format::{fixed4, round4};

/// Slack on the hysteresis comparison so that `0.52` clears `0.50 + 0.02`.
const HYSTERESIS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotAssessment {
    pub snapshot_id: String,
    pub signals: AssuranceSignals,
    pub das: f64,
    pub stateless_drc: DeploymentState,
    pub ges: EscalationLevel,
    /// DAS change against the previous snapshot.
    pub r_p: Option<f64>,
}

impl SnapshotAssessment {
    /// Scores `signals` with the configured weights.
    pub fn assess(snapshot_id: impl Into<String>, signals: AssuranceSignals, cfg: &EngineConfig) -> Result<Self> {
        signals.validate()?;
        let das = compute_das(&signals, &cfg.weights);
        Self::with_das(snapshot_id, signals, das, cfg)
    }

    /// Uses an externally reported DAS instead of recomputing it.
    pub fn with_das(
        snapshot_id: impl Into<String>,
        signals: AssuranceSignals,
        das: f64,
        cfg: &EngineConfig,
    ) -> Result<Self> {
        signals.validate()?;
        if !(0.0..=1.0).contains(&das) {
            return Err(Error::InvalidSignals(format!("das = {das} outside [0, 1]")));
        }
        Ok(SnapshotAssessment {
            snapshot_id: snapshot_id.into(),
            signals,
            das,
            stateless_drc: classify_drc(das, &cfg.bands, signals.worst_zone),
            ges: compute_ges(&signals, &cfg.ges),
            r_p: None,
        })
    }
}

/// Scores an ordered lifecycle. A remediation snapshot without an explicit
/// `r_m` takes its own progression against the previous snapshot as `r_m`.
pub fn assess_sequence(rows: &[(String, AssuranceSignals)], cfg: &EngineConfig) -> Result<Vec<SnapshotAssessment>> {
    let das: Vec<f64> = rows.iter().map(|(_, s)| compute_das(s, &cfg.weights)).collect();
    assess_with_das(rows, &das, cfg)
}

/// Like [`assess_sequence`], with the DAS of each row supplied by the caller.
pub fn assess_with_das(
    rows: &[(String, AssuranceSignals)],
    das: &[f64],
    cfg: &EngineConfig,
) -> Result<Vec<SnapshotAssessment>> {
    if rows.len() != das.len() {
        return Err(Error::InvalidSignals(format!(
            "{} rows but {} DAS values",
            rows.len(),
            das.len()
        )));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, ((id, signals), &score)) in rows.iter().zip(das).enumerate() {
        let r_p = (i > 0).then(|| remediation_progression(das[i - 1], score));
        let mut signals = *signals;
        if signals.remediation_event && signals.r_m.is_none() {
            signals.r_m = r_p.map(|r| r.clamp(-1.0, 1.0));
        }
        let mut a = SnapshotAssessment::with_das(id.clone(), signals, score, cfg)?;
        a.r_p = r_p;
        out.push(a);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionReason {
    DasBandChange,
    FragilityOverride,
    RemediationRecovery,
    RecoveryGated,
    HysteresisHold,
    FailedRemediation,
}

impl TransitionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionReason::DasBandChange => "das_band_change",
            TransitionReason::FragilityOverride => "fragility_override",
            TransitionReason::RemediationRecovery => "remediation_recovery",
            TransitionReason::RecoveryGated => "recovery_gated",
            TransitionReason::HysteresisHold => "hysteresis_hold",
            TransitionReason::FailedRemediation => "failed_remediation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub from_state: DeploymentState,
    pub to_state: DeploymentState,
    pub trigger_reasons: Vec<TransitionReason>,
    pub r_p: Option<f64>,
}

impl TransitionRecord {
    pub fn is_identity(&self) -> bool {
        self.from_state == self.to_state
    }

    /// `From->To:reason;reason`, as written to the trace CSV.
    pub fn summary(&self) -> String {
        let reasons: Vec<&str> = self.trigger_reasons.iter().map(|r| r.as_str()).collect();
        format!("{}->{}:{}", self.from_state, self.to_state, reasons.join(";"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RulesConfig {
    pub bands: DrcBands,
    pub recovery_gating: bool,
    pub hysteresis: f64,
}

impl Default for RulesConfig {
    fn default() -> Self {
        RulesConfig {
            bands: DrcBands::default(),
            recovery_gating: true,
            hysteresis: 0.02,
        }
    }
}

impl RulesConfig {
    pub fn validate(&self) -> Result<()> {
        self.bands.validate()?;
        if !(0.0..1.0).contains(&self.hysteresis) {
            return Err(Error::config(
                "lifecycle.hysteresis",
                format!("must lie in [0, 1), got {}", self.hysteresis),
            ));
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> String {
        fingerprint_of(self)
    }
}

/// One application of the transition rules.
pub fn step(
    current: DeploymentState,
    assessment: &SnapshotAssessment,
    rules: &RulesConfig,
) -> (DeploymentState, TransitionRecord) {
    let target = assessment.stateless_drc;
    let by_band = classify_drc(assessment.das, &rules.bands, None);
    let signals = &assessment.signals;
    let mut reasons = Vec::new();

    let next = if target < current {
        if by_band < current {
            reasons.push(TransitionReason::DasBandChange);
        }
        if by_band > target {
            reasons.push(TransitionReason::FragilityOverride);
        }
        target
    } else if target > current && signals.remediation_event {
        let mut dest = target;
        if rules.recovery_gating {
            dest = dest.min(current.one_level_up());
        }
        if current == DeploymentState::BlockedDeployment {
            dest = dest.min(DeploymentState::ReassessmentRequired);
        }
        let limited = dest;
        while dest > current
            && assessment.das - rules.bands.lower_bound(dest) < rules.hysteresis - HYSTERESIS_EPS
        {
            dest = dest.one_level_down();
        }
        if dest > current {
            reasons.push(TransitionReason::DasBandChange);
            reasons.push(TransitionReason::RemediationRecovery);
            if limited < target {
                reasons.push(TransitionReason::RecoveryGated);
            }
            if dest < limited {
                reasons.push(TransitionReason::HysteresisHold);
            }
        }
        dest
    } else {
        current
    };

    if next != current && signals.remediation_event && signals.r_m.is_some_and(|r| r < 0.0) {
        reasons.push(TransitionReason::FailedRemediation);
    }

    (
        next,
        TransitionRecord {
            from_state: current,
            to_state: next,
            trigger_reasons: reasons,
            r_p: assessment.r_p,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub assessment: SnapshotAssessment,
    pub governed_state: DeploymentState,
    /// Transition from the previous snapshot's governed state, if any.
    pub transition: Option<TransitionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GovernanceTrace {
    pub initial_state: DeploymentState,
    /// Move from `initial_state` into the first snapshot's governed state.
    pub entry_transition: Option<TransitionRecord>,
    pub entries: Vec<TraceEntry>,
    pub fingerprint: String,
}

impl GovernanceTrace {
    pub fn governed_states(&self) -> Vec<DeploymentState> {
        self.entries.iter().map(|e| e.governed_state).collect()
    }
}

/// Folds [`step`] over the sequence, recomputing `r_p` between consecutive
/// snapshots. The first snapshot carries no `r_p`.
pub fn replay(
    assessments: &[SnapshotAssessment],
    initial_state: DeploymentState,
    rules: &RulesConfig,
) -> Result<GovernanceTrace> {
    if assessments.is_empty() {
        return Err(Error::EmptySequence);
    }
    rules.validate()?;

    let mut state = initial_state;
    let mut entry_transition = None;
    let mut entries = Vec::with_capacity(assessments.len());

    for (i, a) in assessments.iter().enumerate() {
        let expected = classify_drc(a.das, &rules.bands, a.signals.worst_zone);
        if expected != a.stateless_drc {
            return Err(Error::InvalidSignals(format!(
                "snapshot '{}': stateless class {} disagrees with bands ({expected})",
                a.snapshot_id, a.stateless_drc
            )));
        }
        let mut a = a.clone();
        a.r_p = (i > 0).then(|| remediation_progression(assessments[i - 1].das, a.das));

        let (next, record) = step(state, &a, rules);
        let record = (!record.is_identity()).then_some(record);
        state = next;
        if i == 0 {
            entry_transition = record;
            entries.push(TraceEntry {
                assessment: a,
                governed_state: next,
                transition: None,
            });
        } else {
            entries.push(TraceEntry {
                assessment: a,
                governed_state: next,
                transition: record,
            });
        }
    }

    Ok(GovernanceTrace {
        initial_state,
        entry_transition,
        entries,
        fingerprint: rules.fingerprint(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

pub const TRACE_COLUMNS: [&str; 11] = [
    "snapshot_id",
    "fdi",
    "delta_fpr",
    "delta_fnr",
    "tsz",
    "das",
    "ges",
    "stateless_drc",
    "governed_state",
    "transition",
    "r_p",
];

#[derive(Serialize)]
struct JsonTransition<'a> {
    from_state: DeploymentState,
    to_state: DeploymentState,
    trigger_reasons: &'a [TransitionReason],
    r_p: Option<f64>,
}

impl<'a> From<&'a TransitionRecord> for JsonTransition<'a> {
    fn from(t: &'a TransitionRecord) -> Self {
        JsonTransition {
            from_state: t.from_state,
            to_state: t.to_state,
            trigger_reasons: &t.trigger_reasons,
            r_p: t.r_p.map(round4),
        }
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    snapshot_id: &'a str,
    fdi: f64,
    delta_fpr: f64,
    delta_fnr: f64,
    tsz: f64,
    das: f64,
    ges: EscalationLevel,
    stateless_drc: DeploymentState,
    governed_state: DeploymentState,
    transition: Option<JsonTransition<'a>>,
    r_p: Option<f64>,
}

#[derive(Serialize)]
struct JsonTrace<'a> {
    fingerprint: &'a str,
    initial_state: DeploymentState,
    entry_transition: Option<JsonTransition<'a>>,
    rows: Vec<JsonRow<'a>>,
}

/// Serializes a trace. CSV reals carry four decimals (round-half-even);
/// JSON reals are rounded the same way.
pub fn emit_trace(trace: &GovernanceTrace, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let ser = |e: csv::Error| Error::Serialize(e.to_string());
            w.write_record(TRACE_COLUMNS).map_err(ser)?;
            for e in &trace.entries {
                let a = &e.assessment;
                let s = &a.signals;
                w.write_record([
                    a.snapshot_id.clone(),
                    fixed4(s.fdi),
                    fixed4(s.delta_fpr),
                    fixed4(s.delta_fnr),
                    fixed4(s.tsz),
                    fixed4(a.das),
                    a.ges.to_string(),
                    a.stateless_drc.to_string(),
                    e.governed_state.to_string(),
                    e.transition.as_ref().map(|t| t.summary()).unwrap_or_default(),
                    a.r_p.map(fixed4).unwrap_or_default(),
                ])
                .map_err(ser)?;
            }
            w.into_inner().map_err(|e| Error::Serialize(e.to_string()))
        }
        OutputFormat::Json => {
            let doc = JsonTrace {
                fingerprint: &trace.fingerprint,
                initial_state: trace.initial_state,
                entry_transition: trace.entry_transition.as_ref().map(Into::into),
                rows: trace
                    .entries
                    .iter()
                    .map(|e| {
                        let a = &e.assessment;
                        JsonRow {
                            snapshot_id: &a.snapshot_id,
                            fdi: round4(a.signals.fdi),
                            delta_fpr: round4(a.signals.delta_fpr),
                            delta_fnr: round4(a.signals.delta_fnr),
                            tsz: round4(a.signals.tsz),
                            das: round4(a.das),
                            ges: a.ges,
                            stateless_drc: a.stateless_drc,
                            governed_state: e.governed_state,
                            transition: e.transition.as_ref().map(Into::into),
                            r_p: a.r_p.map(round4),
                        }
                    })
                    .collect(),
            };
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Serialize(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
