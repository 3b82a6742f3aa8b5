//! Engine configuration: every tunable default in one TOML-loadable struct.
//!
//! ```toml
//! operating_threshold = 0.5
//!
//! [weights]
//! alpha = 0.25
//! beta = 0.25
//! gamma = 0.25
//! delta = 0.25
//!
//! [bands]
//! deployable = 0.85
//! restricted = 0.65
//! reassessment = 0.50
//! escalated = 0.30
//!
//! [zones]
//! sensitive = 0.25
//! amplified = 0.75
//! fragility = 1.5
//!
//! [sweep]
//! t_min = 0.20
//! t_max = 0.90
//! step = 0.05
//!
//! [fdi]
//! mode = "continuous"
//! metrics = ["delta_fpr", "delta_fnr", "delta_tpr", "delta_sr"]
//! default_tolerance = 0.1
//! min_support = 30
//!
//! [tsz]
//! s_ref = 2.0
//! aggregation = "mean"
//!
//! [lifecycle]
//! recovery_gating = true
//! hysteresis = 0.02
//! initial_state = "ReassessmentRequired"
//! ```
//!
//! Omitted sections take their defaults; `weights` and `bands`, when present,
//! must be given in full.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assurance::{validate_weights, DeploymentState, DrcBands, GesThresholds, WeightVector};
use crate::disagreement::PanelConfig;
use crate::error::{Error, Result};
use crate::lifecycle::RulesConfig;
use crate::stability::{Aggregation, SweepRange, ZoneConfig, DEFAULT_S_REF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TszConfig {
    pub s_ref: f64,
    pub aggregation: Aggregation,
}

impl Default for TszConfig {
    fn default() -> Self {
        TszConfig {
            s_ref: DEFAULT_S_REF,
            aggregation: Aggregation::Mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifecycleConfig {
    pub recovery_gating: bool,
    pub hysteresis: f64,
    pub initial_state: DeploymentState,
}

impl Default for LifecycleConfig {
    fn default() -> Self {
        LifecycleConfig {
            recovery_gating: true,
            hysteresis: 0.02,
            initial_state: DeploymentState::ReassessmentRequired,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Decision threshold at which FDI and the rate gaps are reported.
    pub operating_threshold: f64,
    pub weights: WeightVector,
    pub bands: DrcBands,
    pub zones: ZoneConfig,
    pub sweep: SweepRange,
    pub fdi: PanelConfig,
    pub tsz: TszConfig,
    pub ges: GesThresholds,
    pub lifecycle: LifecycleConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            operating_threshold: 0.5,
            weights: WeightVector::default(),
            bands: DrcBands::default(),
            zones: ZoneConfig::default(),
            sweep: SweepRange::default(),
            fdi: PanelConfig::default(),
            tsz: TszConfig::default(),
            ges: GesThresholds::default(),
            lifecycle: LifecycleConfig::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.operating_threshold) {
            return Err(Error::config("operating_threshold", "must lie in [0, 1]"));
        }
        validate_weights(&self.weights).map_err(|e| Error::config("weights", e.to_string()))?;
        self.bands.validate()?;
        self.zones.validate()?;
        self.sweep
            .validate()
            .map_err(|e| Error::config("sweep", e.to_string()))?;
        self.fdi.validate()?;
        if self.fdi.min_support == 0 {
            return Err(Error::config("fdi.min_support", "must be at least 1"));
        }
        if !(self.tsz.s_ref > 0.0 && self.tsz.s_ref.is_finite()) {
            return Err(Error::config("tsz.s_ref", "must be positive"));
        }
        self.ges.validate()?;
        self.rules().validate()
    }

    pub fn rules(&self) -> RulesConfig {
        RulesConfig {
            bands: self.bands,
            recovery_gating: self.lifecycle.recovery_gating,
            hysteresis: self.lifecycle.hysteresis,
        }
    }

    /// Short SHA-256 digest of the canonical JSON form of the config.
    pub fn fingerprint(&self) -> String {
        fingerprint_of(self)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: EngineConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "toml".into());
            Error::config(field, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// Loads and validates a config file, or returns the defaults for `None`.
pub fn load_config(path: Option<&Path>) -> Result<EngineConfig> {
    let Some(path) = path else {
        return Ok(EngineConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    EngineConfig::from_toml(&text).map_err(|e| match e {
        Error::ConfigInvalid { field, message } => Error::ConfigInvalid {
            field: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    })
}

pub(crate) fn fingerprint_of<T: Serialize>(value: &T) -> String {
    // serde_json writes struct fields in declaration order and map keys in
    // BTreeMap order, so this text is canonical for a given value.
    let canonical = serde_json::to_string(value).expect("config serializes to JSON");
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(&digest[..8])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = load_config(None).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.weights.as_array(), [0.25; 4]);
        assert_eq!(cfg.bands, DrcBands::default());
        assert_eq!(cfg.bands.deployable, 0.85);
        assert_eq!(cfg.bands.escalated, 0.30);
        assert_eq!(cfg.zones.fragility, 1.5);
        assert_eq!(cfg.sweep.step, 0.05);
        assert_eq!(cfg.fdi.min_support, 30);
        assert_eq!(cfg.tsz.s_ref, 2.0);
        assert!(cfg.lifecycle.recovery_gating);
        assert_eq!(cfg.lifecycle.hysteresis, 0.02);
        assert_eq!(cfg.lifecycle.initial_state, DeploymentState::ReassessmentRequired);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let err = EngineConfig::from_toml(
            "[weights]\nalpha = 0.3\nbeta = 0.3\ngamma = 0.3\ndelta = 0.0\n",
        )
        .unwrap_err();
        match err {
            Error::ConfigInvalid { field, message } => {
                assert_eq!(field, "weights");
                assert!(message.contains("alpha + beta + gamma + delta = 1"), "{message}");
                assert!(message.contains("0.9"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bands_must_decrease() {
        let err = EngineConfig::from_toml(
            "[bands]\ndeployable = 0.5\nrestricted = 0.6\nreassessment = 0.4\nescalated = 0.2\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::ConfigInvalid { ref field, .. } if field == "bands"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(EngineConfig::from_toml("colour = 3\n").is_err());
        assert!(EngineConfig::from_toml("[lifecycle]\nhysteresis = 1.5\n").is_err());
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let cfg = EngineConfig::from_toml("[lifecycle]\nrecovery_gating = false\n").unwrap();
        assert!(!cfg.lifecycle.recovery_gating);
        assert_eq!(cfg.bands, DrcBands::default());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = EngineConfig::default();
        let b = EngineConfig::from_toml(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
        let mut c = a.clone();
        c.lifecycle.recovery_gating = false;
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_config(Some(Path::new("/nonexistent/engine.toml"))).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
