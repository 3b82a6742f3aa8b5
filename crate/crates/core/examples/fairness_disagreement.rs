// Fairness Disagreement Index in continuous and verdict modes.
//
// Run with `cargo run --example fairness_disagreement`.

use deployment_assurance::prelude::*;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Four fairness notions that disagree sharply about the same model.
    let panel = DisparityPanel::new([
        ("delta_fpr", 0.304),
        ("delta_fnr", 0.694),
        ("delta_tpr", 0.694),
        ("delta_sr", 0.05),
    ])?
    .with_uniform_tolerance(0.1)?;

    let continuous = compute_fdi(&panel, FdiMode::Continuous)?;
    let verdict = compute_fdi(&panel, FdiMode::Verdict)?;
    println!("continuous FDI {:.4}", continuous.value);
    // Only delta_sr passes the 0.1 tolerance: 3 of 6 pairs disagree.
    println!("verdict FDI    {:.4}", verdict.value);
    assert_eq!(verdict.value, 0.5);

    // Agreement in either sense gives zero.
    let agree = DisparityPanel::new([("a", 0.2), ("b", 0.2), ("c", 0.2)])?.with_uniform_tolerance(0.1)?;
    assert_eq!(compute_fdi(&agree, FdiMode::Continuous)?.value, 0.0);
    assert_eq!(compute_fdi(&agree, FdiMode::Verdict)?.value, 0.0);

    // Tolerances may differ per metric.
    let strict = DisparityPanel::new([("delta_fpr", 0.12), ("delta_fnr", 0.12)])?
        .with_tolerance("delta_fpr", 0.1)?
        .with_tolerance("delta_fnr", 0.15)?;
    println!("mixed tolerances: verdict FDI {:.1}", compute_fdi(&strict, FdiMode::Verdict)?.value);

    // Built straight from disparity gaps via the panel config.
    let gaps = DisparityGaps {
        delta_fpr: 0.1,
        delta_fnr: 0.3,
        delta_tpr: 0.3,
        delta_sr: 0.5,
        excluded_subgroups: vec![],
    };
    let fdi = PanelConfig::default().fdi(&gaps)?;
    println!("default panel over gaps: {:.4} ({})", fdi.value, fdi.mode);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
