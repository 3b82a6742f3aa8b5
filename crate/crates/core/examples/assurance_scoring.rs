// Deployment Assurance Score, readiness class and escalation level for a
// baseline model and two remediated variants.
//
// Run with `cargo run --example assurance_scoring`.

use deployment_assurance::prelude::*;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EngineConfig::default();
    let rows = [
        ("baseline", AssuranceSignals::new(0.68, 0.304, 0.694, 0.42)?),
        ("balanced-batches", AssuranceSignals::new(0.41, 0.206, 0.424, 0.28)?),
        ("focal-loss", AssuranceSignals::new(0.62, 0.304, 0.701, 0.39)?),
    ];

    println!("model                 DAS  GES       readiness");
    let mut scores = Vec::new();
    for (name, s) in &rows {
        let das = compute_das(s, &cfg.weights);
        let ges = compute_ges(s, &cfg.ges);
        let drc = classify_drc(das, &cfg.bands, s.worst_zone);
        println!("{name:18} {das:6.4}  {ges:9} {drc}");
        scores.push(das);
    }
    println!(
        "progression vs baseline: {:+.4}, {:+.4}",
        remediation_progression(scores[0], scores[1]),
        remediation_progression(scores[0], scores[2])
    );

    // Weights must lie on the simplex.
    let risk_averse = WeightVector::new(0.4, 0.2, 0.3, 0.1)?;
    println!("FDI-heavy weighting, baseline DAS {:.4}", compute_das(&rows[0].1, &risk_averse));
    assert!(WeightVector::new(0.3, 0.3, 0.3, 0.0).is_err());

    // Severe threshold fragility caps readiness regardless of the score.
    let fragile = AssuranceSignals::new(0.05, 0.02, 0.03, 0.1)?.with_worst_zone(ZoneLabel::GovernanceFragility);
    let das = compute_das(&fragile, &cfg.weights);
    println!("fragile model: DAS {das:.4} -> {}", classify_drc(das, &cfg.bands, fragile.worst_zone));

    // A remediation that made things worse bumps escalation one level.
    let failed = rows[0].1.with_remediation(Some(-0.1))?;
    println!("after failed remediation: {}", compute_ges(&failed, &cfg.ges));
    assert_eq!(compute_ges(&failed, &cfg.ges), EscalationLevel::Critical);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
