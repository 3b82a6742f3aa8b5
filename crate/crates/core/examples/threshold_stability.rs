// Threshold sweep, sensitivity |dFDI/dt|, stability zones and the TSZ scalar.
//
// Run with `cargo run --example threshold_stability`.

use deployment_assurance::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic(seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = [("a", 0.70, 0.35, 0.10), ("b", 0.55, 0.40, 0.20), ("c", 0.80, 0.25, 0.05)];
    let mut out = Vec::new();
    for (name, pos, neg, spread) in groups {
        for i in 0..150 {
            let label = u8::from(rng.gen_bool(0.5));
            let centre = if label == 1 { pos } else { neg };
            let score: f64 = centre + rng.gen_range(-1.0..1.0) * (0.1 + spread);
            out.push(Sample::new(format!("{name}{i}"), score.clamp(0.0, 1.0), label, name).unwrap());
        }
    }
    out
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let samples = synthetic(11);
    let range = SweepRange::default(); // 0.20..0.90 step 0.05
    let panel = PanelConfig::default();

    let profile = sweep(&samples, &range, &panel)?;
    let zones = ZoneConfig::default();
    let sens = sensitivity(&profile, &zones)?;

    println!("   t     fdi   |dFDI/dt|  zone");
    for (p, s) in profile.points().iter().zip(&sens.points) {
        println!("{:5.2}  {:.4}  {:8.4}  {}", p.threshold, p.fdi, s.sensitivity, s.zone);
    }

    let mean = tsz_scalar(&sens, Aggregation::Mean, 2.0)?;
    let max = tsz_scalar(&sens, Aggregation::Max, 2.0)?;
    println!("TSZ scalar: mean {:.4}, max {:.4}", mean.value, max.value);
    println!("worst zone: {:?}", sens.worst_zone());
    assert_eq!(profile.points().len(), 15);
    assert!((0.0..=1.0).contains(&mean.value));

    // Finite differences on a known profile: central differences are exact
    // for quadratics at interior points.
    let quad = FdiProfile::from_fn(0.2, 0.05, 15, |t| t * t)?;
    let s = sensitivity(&quad, &zones)?;
    println!("t^2 profile, s(0.5) = {:.6}", s.points[6].sensitivity);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
