// From raw per-sample predictions to a governed deployment trace: evaluate,
// sweep, score, classify and replay a baseline and a remediated model.
//
// Run with `cargo run --example end_to_end`.

use deployment_assurance::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `skew` widens the gap between subgroup score distributions.
fn model_outputs(seed: u64, skew: f64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, name) in ["north", "south", "east"].iter().enumerate() {
        let shift = skew * (g as f64 - 1.0);
        for i in 0..200 {
            let label = u8::from(rng.gen_bool(0.45));
            let centre = if label == 1 { 0.68 + shift } else { 0.32 + shift };
            let score: f64 = centre + rng.gen_range(-0.3..0.3);
            out.push(Sample::new(format!("{name}-{i}"), score.clamp(0.0, 1.0), label, *name).unwrap());
        }
    }
    out
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EngineConfig::default();
    let snapshots = [("baseline", model_outputs(1, 0.15), false), ("rebalanced", model_outputs(2, 0.03), true)];

    let mut rows = Vec::new();
    for (name, samples, remediated) in &snapshots {
        let analysis = analyze_predictions(samples, &cfg)?;
        let mut signals = analysis.signals();
        if *remediated {
            signals = signals.with_remediation(None)?;
        }
        println!(
            "{name:10} fdi {:.4}  dFPR {:.4}  dFNR {:.4}  tsz {:.4}  worst zone {:?}",
            signals.fdi, signals.delta_fpr, signals.delta_fnr, signals.tsz, signals.worst_zone
        );
        rows.push((name.to_string(), signals));
    }

    let assessed = assess_sequence(&rows, &cfg)?;
    for a in &assessed {
        println!("{:10} DAS {:.4}  {}  {}", a.snapshot_id, a.das, a.ges, a.stateless_drc);
    }
    let trace = replay(&assessed, cfg.lifecycle.initial_state, &cfg.rules())?;
    print!("{}", String::from_utf8(emit_trace(&trace, OutputFormat::Json)?)?);
    assert!(assessed[1].das > assessed[0].das);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
