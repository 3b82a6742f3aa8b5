// Governed deployment states across a remediation lifecycle, with and
// without recovery gating, emitted as a CSV trace.
//
// Run with `cargo run --example remediation_lifecycle`.

use deployment_assurance::prelude::*;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EngineConfig::default();
    let rows = vec![
        ("baseline".to_string(), AssuranceSignals::new(0.68, 0.304, 0.694, 0.42)?),
        (
            "balanced-batches".to_string(),
            AssuranceSignals::new(0.41, 0.206, 0.424, 0.28)?.with_remediation(None)?,
        ),
        (
            "focal-loss".to_string(),
            AssuranceSignals::new(0.62, 0.304, 0.701, 0.39)?.with_remediation(None)?,
        ),
    ];

    // Externally reported assurance scores for the same three snapshots.
    let reported = assess_with_das(&rows, &[0.48, 0.71, 0.52], &cfg)?;

    for gating in [true, false] {
        let rules = RulesConfig {
            recovery_gating: gating,
            ..cfg.rules()
        };
        let trace = replay(&reported, DeploymentState::ReassessmentRequired, &rules)?;
        println!("recovery gating {}: {:?}", if gating { "on" } else { "off" }, trace.governed_states());
        for e in &trace.entries {
            if let Some(t) = &e.transition {
                println!("  {} {}", e.assessment.snapshot_id, t.summary());
            }
        }
    }

    // Recomputing DAS from the signals with equal weights.
    let computed = assess_sequence(&rows, &cfg)?;
    let trace = replay(&computed, cfg.lifecycle.initial_state, &cfg.rules())?;
    print!("{}", String::from_utf8(emit_trace(&trace, OutputFormat::Csv)?)?);

    // A long synthetic lifecycle: decay, then staged recovery after remediation.
    let mut seq = Vec::new();
    for (i, x) in [0.1, 0.3, 0.5, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05].into_iter().enumerate() {
        let s = AssuranceSignals::new(x, x, x, x)?;
        let s = if i >= 5 { s.with_remediation(None)? } else { s };
        seq.push((format!("week-{i}"), s));
    }
    let trace = replay(&assess_sequence(&seq, &cfg)?, DeploymentState::Deployable, &cfg.rules())?;
    println!("synthetic lifecycle: {:?}", trace.governed_states());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
