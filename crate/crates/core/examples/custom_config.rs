// Loading a TOML engine config, validation errors and fingerprints.
//
// Run with `cargo run --example custom_config`.

use deployment_assurance::prelude::*;

const STRICT: &str = r#"
[weights]
alpha = 0.4
beta = 0.2
gamma = 0.2
delta = 0.2

[bands]
deployable = 0.9
restricted = 0.75
reassessment = 0.6
escalated = 0.4

[lifecycle]
recovery_gating = true
hysteresis = 0.05
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let defaults = EngineConfig::default();
    let strict = EngineConfig::from_toml(STRICT)?;
    println!("default config fingerprint {}", defaults.fingerprint());
    println!("strict config fingerprint  {}", strict.fingerprint());

    let s = AssuranceSignals::new(0.41, 0.206, 0.424, 0.28)?;
    for (name, cfg) in [("default", &defaults), ("strict", &strict)] {
        let das = compute_das(&s, &cfg.weights);
        println!("{name:8} DAS {das:.4} -> {}", classify_drc(das, &cfg.bands, None));
    }

    let bad = "[weights]\nalpha = 0.3\nbeta = 0.3\ngamma = 0.3\ndelta = 0.0\n";
    match EngineConfig::from_toml(bad) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("weights off the simplex must be rejected"),
    }

    // Round trip through TOML keeps the fingerprint.
    let again = EngineConfig::from_toml(&strict.to_toml()?)?;
    assert_eq!(again.fingerprint(), strict.fingerprint());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
