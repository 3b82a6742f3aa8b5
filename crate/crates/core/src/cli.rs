//! Command-line surface. The `deploy-assure` binary parses [`Cli`] and hands
//! it to [`run`]; everything printable is produced here so it can be tested
//! without spawning a process.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::assurance::{classify_drc, DeploymentState};
use crate::config::{load_config, EngineConfig};
use crate::error::{Error, Result};
use crate::evaluation::evaluate;
use crate::format::{fixed4, round4};
use crate::io::{parse_predictions, parse_signals};
use crate::lifecycle::{assess_sequence, emit_trace, replay, OutputFormat};
use crate::stability::{sensitivity, sweep, tsz_scalar, SweepRange, ZoneLabel};

#[derive(Debug, Parser)]
#[command(name = "deploy-assure", version, about = "Fairness disagreement and deployment-readiness assessment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Gating {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-subgroup rates, disparity gaps and FDI at one threshold.
    Evaluate {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        threshold: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// FDI, sensitivity and stability zone across a threshold grid.
    Sweep {
        #[arg(long)]
        predictions: PathBuf,
        /// MIN:MAX:STEP, e.g. 0.2:0.9:0.05
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// DAS, escalation level and stateless readiness class per signals row.
    Score {
        #[arg(long)]
        signals: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Governed state trace over an ordered signals file.
    Lifecycle {
        #[arg(long)]
        signals: PathBuf,
        #[arg(long)]
        initial: Option<String>,
        #[arg(long, value_enum)]
        gating: Option<Gating>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Readiness class for a single DAS value.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        das: f64,
        /// Worst stability zone, if known (GovernanceFragility caps the class).
        #[arg(long)]
        zone: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn rate(v: Option<f64>) -> String {
    v.map(fixed4).unwrap_or_default()
}

fn json_text(value: &serde_json::Value) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Serialize(e.to_string()))
}

fn csv_text(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).map_err(|e| Error::Serialize(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

fn row<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

/// Executes one command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Evaluate {
            predictions,
            threshold,
            config,
            format,
        } => {
            let cfg = load_config(config.as_deref())?;
            let samples = parse_predictions(predictions)?;
            let report = evaluate(&samples, *threshold, cfg.fdi.min_support)?;
            let fdi = cfg.fdi.fdi(&report.gaps)?;
            match format {
                Format::Json => json_text(&json!({
                    "threshold": threshold,
                    "subgroups": report.subgroups,
                    "gaps": report.gaps,
                    "mean_fpr": round4(report.mean_fpr),
                    "mean_fnr": round4(report.mean_fnr),
                    "fdi": fdi,
                })),
                Format::Csv => {
                    let mut rows = vec![row([
                        "subgroup", "n", "tp", "fp", "tn", "fn", "fpr", "fnr", "tpr", "selection_rate",
                    ])];
                    for g in &report.subgroups {
                        let c = g.counts;
                        rows.push(vec![
                            g.subgroup.clone(),
                            c.total().to_string(),
                            c.true_pos.to_string(),
                            c.false_pos.to_string(),
                            c.true_neg.to_string(),
                            c.false_neg.to_string(),
                            rate(g.rates.fpr),
                            rate(g.rates.fnr),
                            rate(g.rates.tpr),
                            rate(g.rates.selection_rate),
                        ]);
                    }
                    let mut out = csv_text(rows)?;
                    out.push('\n');
                    let gaps = &report.gaps;
                    out += &csv_text(vec![
                        row(["metric", "value"]),
                        vec!["threshold".into(), fixed4(*threshold)],
                        vec!["delta_fpr".into(), fixed4(gaps.delta_fpr)],
                        vec!["delta_fnr".into(), fixed4(gaps.delta_fnr)],
                        vec!["delta_tpr".into(), fixed4(gaps.delta_tpr)],
                        vec!["delta_sr".into(), fixed4(gaps.delta_sr)],
                        vec!["mean_fpr".into(), fixed4(report.mean_fpr)],
                        vec!["mean_fnr".into(), fixed4(report.mean_fnr)],
                        vec!["fdi".into(), fixed4(fdi.value)],
                        vec!["fdi_mode".into(), fdi.mode.to_string()],
                    ])?;
                    Ok(out)
                }
            }
        }

        Command::Sweep {
            predictions,
            range,
            config,
            format,
        } => {
            let cfg = load_config(config.as_deref())?;
            let range: SweepRange = match range {
                Some(r) => r.parse()?,
                None => cfg.sweep,
            };
            let samples = parse_predictions(predictions)?;
            let profile = sweep(&samples, &range, &cfg.fdi)?;
            let sens = sensitivity(&profile, &cfg.zones)?;
            let tsz = tsz_scalar(&sens, cfg.tsz.aggregation, cfg.tsz.s_ref)?;
            let worst = sens.worst_zone().map(|z| z.to_string()).unwrap_or_default();
            match format {
                Format::Json => {
                    let points: Vec<_> = profile
                        .points()
                        .iter()
                        .zip(&sens.points)
                        .map(|(p, s)| {
                            json!({
                                "threshold": round4(p.threshold),
                                "fdi": round4(p.fdi),
                                "interpolated": p.interpolated,
                                "sensitivity": round4(s.sensitivity),
                                "zone": s.zone,
                            })
                        })
                        .collect();
                    json_text(&json!({
                        "points": points,
                        "tsz": round4(tsz.value),
                        "aggregation": tsz.aggregation,
                        "s_ref": tsz.s_ref,
                        "worst_zone": sens.worst_zone(),
                    }))
                }
                Format::Csv => {
                    let mut rows = vec![row(["threshold", "fdi", "interpolated", "sensitivity", "zone"])];
                    for (p, s) in profile.points().iter().zip(&sens.points) {
                        rows.push(vec![
                            fixed4(p.threshold),
                            fixed4(p.fdi),
                            u8::from(p.interpolated).to_string(),
                            fixed4(s.sensitivity),
                            s.zone.to_string(),
                        ]);
                    }
                    let mut out = csv_text(rows)?;
                    out.push('\n');
                    out += &csv_text(vec![
                        row(["metric", "value"]),
                        vec!["tsz".into(), fixed4(tsz.value)],
                        vec!["aggregation".into(), tsz.aggregation.to_string()],
                        vec!["s_ref".into(), fixed4(tsz.s_ref)],
                        vec!["worst_zone".into(), worst],
                    ])?;
                    Ok(out)
                }
            }
        }

        Command::Score {
            signals,
            config,
            format,
        } => {
            let cfg = load_config(config.as_deref())?;
            let records = parse_signals(signals)?;
            let rows: Vec<_> = records
                .into_iter()
                .map(|r| (r.snapshot_id, r.signals))
                .collect();
            let assessed = assess_sequence(&rows, &cfg)?;
            match format {
                Format::Json => {
                    let items: Vec<_> = assessed
                        .iter()
                        .map(|a| {
                            json!({
                                "snapshot_id": a.snapshot_id,
                                "fdi": round4(a.signals.fdi),
                                "delta_fpr": round4(a.signals.delta_fpr),
                                "delta_fnr": round4(a.signals.delta_fnr),
                                "tsz": round4(a.signals.tsz),
                                "das": round4(a.das),
                                "ges": a.ges,
                                "drc": a.stateless_drc,
                            })
                        })
                        .collect();
                    json_text(&json!({ "fingerprint": cfg.fingerprint(), "rows": items }))
                }
                Format::Csv => {
                    let mut out = vec![row([
                        "snapshot_id", "fdi", "delta_fpr", "delta_fnr", "tsz", "das", "ges", "drc",
                    ])];
                    for a in &assessed {
                        out.push(vec![
                            a.snapshot_id.clone(),
                            fixed4(a.signals.fdi),
                            fixed4(a.signals.delta_fpr),
                            fixed4(a.signals.delta_fnr),
                            fixed4(a.signals.tsz),
                            fixed4(a.das),
                            a.ges.to_string(),
                            a.stateless_drc.to_string(),
                        ]);
                    }
                    csv_text(out)
                }
            }
        }

        Command::Lifecycle {
            signals,
            initial,
            gating,
            config,
            format,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(g) = gating {
                cfg.lifecycle.recovery_gating = *g == Gating::On;
            }
            let initial = match initial {
                Some(s) => s
                    .parse::<DeploymentState>()
                    .map_err(|m| Error::config("--initial", m))?,
                None => cfg.lifecycle.initial_state,
            };
            let records = parse_signals(signals)?;
            let rows: Vec<_> = records
                .into_iter()
                .map(|r| (r.snapshot_id, r.signals))
                .collect();
            let assessed = assess_sequence(&rows, &cfg)?;
            let trace = replay(&assessed, initial, &cfg.rules())?;
            let bytes = emit_trace(&trace, (*format).into())?;
            String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
        }

        Command::Classify {
            das,
            zone,
            config,
            format,
        } => {
            let cfg: EngineConfig = load_config(config.as_deref())?;
            if !(0.0..=1.0).contains(das) {
                return Err(Error::InvalidSignals(format!("das = {das} outside [0, 1]")));
            }
            let zone = match zone {
                Some(z) => Some(z.parse::<ZoneLabel>().map_err(|m| Error::config("--zone", m))?),
                None => None,
            };
            let state = classify_drc(*das, &cfg.bands, zone);
            match format {
                Format::Json => json_text(&json!({ "das": das, "drc": state })),
                Format::Csv => Ok(format!("{state}\n")),
            }
        }
    }
}
