//! Raw predictions to assurance signals.

use serde::Serialize;

use crate::assurance::AssuranceSignals;
use crate::config::EngineConfig;
use crate::disagreement::FdiValue;
use crate::error::Result;
use crate::evaluation::{evaluate, EvaluationReport, Sample};
use crate::stability::{sensitivity, sweep, tsz_scalar, FdiProfile, SensitivityProfile, TszScalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionAnalysis {
    /// Rates and gaps at the operating threshold.
    pub evaluation: EvaluationReport,
    pub fdi: FdiValue,
    pub profile: FdiProfile,
    pub sensitivity: SensitivityProfile,
    pub tsz: TszScalar,
}

impl PredictionAnalysis {
    pub fn signals(&self) -> AssuranceSignals {
        AssuranceSignals {
            fdi: self.fdi.value,
            delta_fpr: self.evaluation.gaps.delta_fpr,
            delta_fnr: self.evaluation.gaps.delta_fnr,
            tsz: self.tsz.value,
            worst_zone: self.sensitivity.worst_zone(),
            remediation_event: false,
            r_m: None,
        }
    }
}

/// Evaluates at `cfg.operating_threshold`, sweeps `cfg.sweep`, and reduces the
/// sensitivity profile to the TSZ scalar.
pub fn analyze_predictions(samples: &[Sample], cfg: &EngineConfig) -> Result<PredictionAnalysis> {
    cfg.validate()?;
    let evaluation = evaluate(samples, cfg.operating_threshold, cfg.fdi.min_support)?;
    let fdi = cfg.fdi.fdi(&evaluation.gaps)?;
    let profile = sweep(samples, &cfg.sweep, &cfg.fdi)?;
    let sens = sensitivity(&profile, &cfg.zones)?;
    let tsz = tsz_scalar(&sens, cfg.tsz.aggregation, cfg.tsz.s_ref)?;
    Ok(PredictionAnalysis {
        evaluation,
        fdi,
        profile,
        sensitivity: sens,
        tsz,
    })
}
