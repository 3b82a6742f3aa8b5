// Per-subgroup confusion counts, rates and disparity gaps at one threshold.
//
// Run with `cargo run --example subgroup_rates`.

use deployment_assurance::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Scores for a subgroup whose positives centre on `pos` and negatives on `neg`.
fn subgroup(rng: &mut ChaCha8Rng, name: &str, n: usize, pos: f64, neg: f64) -> Vec<Sample> {
    (0..n)
        .map(|i| {
            let label = u8::from(i % 2 == 0);
            let centre = if label == 1 { pos } else { neg };
            let score = (centre + rng.gen_range(-0.25..0.25)).clamp(0.0, 1.0);
            Sample::new(format!("{name}-{i}"), score, label, name).unwrap()
        })
        .collect()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut samples = subgroup(&mut rng, "group-a", 120, 0.75, 0.30);
    samples.extend(subgroup(&mut rng, "group-b", 120, 0.60, 0.45));
    samples.extend(subgroup(&mut rng, "group-c", 12, 0.70, 0.20));

    let threshold = 0.5;
    let counts = compute_confusion(&samples, threshold)?;
    println!("threshold {threshold}");
    for (group, c) in &counts {
        let r = compute_rates(c);
        println!(
            "  {group:8} n={:3} tp={:3} fp={:3} tn={:3} fn={:3}  fpr={:?} fnr={:?}",
            c.total(),
            c.true_pos,
            c.false_pos,
            c.true_neg,
            c.false_neg,
            r.fpr,
            r.fnr
        );
    }

    // group-c has only 12 samples and is left out of every gap.
    let report = evaluate(&samples, threshold, 30)?;
    let g = &report.gaps;
    println!(
        "gaps: fpr {:.4}  fnr {:.4}  tpr {:.4}  selection {:.4}",
        g.delta_fpr, g.delta_fnr, g.delta_tpr, g.delta_sr
    );
    for e in &g.excluded_subgroups {
        println!("  excluded {} from {} ({})", e.subgroup, e.metric, e.reason.as_str());
    }
    println!("macro mean fpr {:.4}, fnr {:.4}", report.mean_fpr, report.mean_fnr);

    assert!(g.excluded_subgroups.iter().any(|e| e.subgroup == "group-c"));
    assert_eq!(counts.values().map(|c| c.total()).sum::<u64>(), samples.len() as u64);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
