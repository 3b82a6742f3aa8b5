//! Deployment assurance for evaluated classifiers.
//!
//! The crate turns per-sample model scores with subgroup labels, or
//! precomputed instability signals, into:
//!
//! - per-subgroup confusion counts, rates and disparity gaps ([`evaluation`]);
//! - a Fairness Disagreement Index over a panel of gaps ([`disagreement`]);
//! - threshold sweeps, FDI sensitivity and stability zones ([`stability`]);
//! - a Deployment Assurance Score, readiness class and escalation level
//!   ([`assurance`]);
//! - governed-state traces across remediation lifecycles ([`lifecycle`]).
//!
//! ```
//! use deployment_assurance::prelude::*;
//!
//! let cfg = EngineConfig::default();
//! let signals = AssuranceSignals::new(0.68, 0.304, 0.694, 0.42).unwrap();
//! let das = compute_das(&signals, &cfg.weights);
//! assert!((das - 0.4755).abs() < 1e-12);
//! assert_eq!(classify_drc(das, &cfg.bands, None), DeploymentState::EscalatedGovernance);
//! ```
//!
//! Runnable walkthroughs of each capability live under `examples/`.

// Range checks are written `!(x >= lo)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assurance;
pub mod cli;
pub mod config;
pub mod disagreement;
pub mod error;
pub mod evaluation;
pub mod format;
pub mod io;
pub mod lifecycle;
pub mod pipeline;
pub mod stability;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::assurance::{
        classify_drc, compute_das, compute_ges, remediation_progression, validate_weights,
        AssuranceSignals, DeploymentState, DrcBands, EscalationLevel, GesThresholds, WeightVector,
    };
    pub use crate::config::{load_config, EngineConfig};
    pub use crate::disagreement::{compute_fdi, DisparityPanel, FdiMode, FdiValue, PanelConfig};
    pub use crate::error::Error;
    pub use crate::evaluation::{
        compute_confusion, compute_gaps, compute_rates, evaluate, ConfusionCounts, DisparityGaps,
        GapMetric, RatePanel, Sample,
    };
    pub use crate::lifecycle::{
        assess_sequence, assess_with_das, emit_trace, replay, step, GovernanceTrace, OutputFormat,
        RulesConfig, SnapshotAssessment, TransitionReason, TransitionRecord,
    };
    pub use crate::pipeline::{analyze_predictions, PredictionAnalysis};
    pub use crate::stability::{
        classify_zone, sensitivity, sweep, tsz_scalar, Aggregation, FdiProfile, SensitivityProfile,
        SweepRange, TszScalar, ZoneConfig, ZoneLabel,
    };
}
