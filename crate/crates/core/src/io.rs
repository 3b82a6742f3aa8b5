//! Predictions and signals files.
//!
//! Both are read as CSV with a header row, or as JSON lines when the file
//! extension is `.jsonl` / `.ndjson`. Row numbers in errors are 1-based
//! physical lines, so the first CSV data row is row 2.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::assurance::AssuranceSignals;
use crate::error::{Error, Result};
use crate::evaluation::Sample;
use crate::format::fixed4;
use crate::stability::ZoneLabel;

pub const PREDICTION_COLUMNS: [&str; 4] = ["sample_id", "score", "label", "subgroup"];
pub const SIGNAL_COLUMNS: [&str; 6] = [
    "snapshot_id",
    "fdi",
    "delta_fpr",
    "delta_fnr",
    "tsz",
    "remediation_event",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    JsonLines,
}

impl TableFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => TableFormat::JsonLines,
            _ => TableFormat::Csv,
        }
    }
}

/// One parsed row: a field lookup plus its line number.
struct Row {
    line: usize,
    fields: HashMap<String, String>,
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows(text: &str, file: &str, format: TableFormat, required: &[&str]) -> Result<Vec<Row>> {
    let rows = match format {
        TableFormat::Csv => read_csv_rows(text, file, required)?,
        TableFormat::JsonLines => read_jsonl_rows(text, file, required)?,
    };
    if rows.is_empty() {
        return Err(Error::EmptyFile { file: file.into() });
    }
    Ok(rows)
}

fn read_csv_rows(text: &str, file: &str, required: &[&str]) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedRow {
            file: file.into(),
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile { file: file.into() });
    }
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(Error::MissingColumn {
                file: file.into(),
                column: (*col).into(),
            });
        }
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let fallback = i + 2;
        let record = record.map_err(|e| Error::MalformedRow {
            file: file.into(),
            row: e.position().map_or(fallback, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(fallback, |p| p.line() as usize);
        let fields = headers
            .iter()
            .zip(record.iter())
            .map(|(h, v)| (h.to_string(), v.to_string()))
            .collect();
        rows.push(Row { line, fields });
    }
    Ok(rows)
}

fn read_jsonl_rows(text: &str, file: &str, required: &[&str]) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| Error::MalformedRow {
            file: file.into(),
            row: line,
            message,
        };
        let value: Value = serde_json::from_str(raw).map_err(|e| malformed(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(malformed("expected a JSON object".into()));
        };
        if let Some(missing) = required.iter().find(|k| !map.contains_key(**k)) {
            return Err(malformed(format!("missing key '{missing}'")));
        }
        let fields = map
            .into_iter()
            .map(|(k, v)| {
                let s = match v {
                    Value::String(s) => s,
                    Value::Null => String::new(),
                    Value::Bool(b) => if b { "1" } else { "0" }.to_string(),
                    other => other.to_string(),
                };
                (k, s)
            })
            .collect();
        rows.push(Row { line, fields });
    }
    Ok(rows)
}

impl Row {
    fn malformed(&self, file: &str, message: String) -> Error {
        Error::MalformedRow {
            file: file.into(),
            row: self.line,
            message,
        }
    }

    fn text(&self, key: &str) -> &str {
        self.fields.get(key).map(String::as_str).unwrap_or("")
    }

    fn unit(&self, file: &str, key: &str) -> Result<f64> {
        let raw = self.text(key);
        let v: f64 = raw
            .parse()
            .map_err(|_| self.malformed(file, format!("{key} '{raw}' is not a number")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(self.malformed(file, format!("{key} {v} outside [0, 1]")));
        }
        Ok(v)
    }

    fn flag(&self, file: &str, key: &str) -> Result<bool> {
        match self.text(key) {
            "0" | "false" => Ok(false),
            "1" | "true" => Ok(true),
            other => Err(self.malformed(file, format!("{key} '{other}' must be 0 or 1"))),
        }
    }
}

fn display_name(path: &Path) -> String {
    path.display().to_string()
}

pub fn parse_predictions(path: &Path) -> Result<Vec<Sample>> {
    let text = read_file(path)?;
    parse_predictions_str(&text, &display_name(path), TableFormat::from_path(path))
}

/// Parses predictions already in memory; `file` names the source in errors.
pub fn parse_predictions_str(text: &str, file: &str, format: TableFormat) -> Result<Vec<Sample>> {
    let rows = read_rows(text, file, format, &PREDICTION_COLUMNS)?;
    rows.iter()
        .map(|row| {
            let sample_id = row.text("sample_id");
            if sample_id.is_empty() {
                return Err(row.malformed(file, "empty sample_id".into()));
            }
            let score = row.unit(file, "score")?;
            let label = match row.text("label") {
                "0" => 0,
                "1" => 1,
                other => return Err(row.malformed(file, format!("label '{other}' must be 0 or 1"))),
            };
            let subgroup = row.text("subgroup");
            if subgroup.is_empty() {
                return Err(row.malformed(file, "empty subgroup".into()));
            }
            Ok(Sample {
                sample_id: sample_id.into(),
                score,
                label,
                subgroup: subgroup.into(),
            })
        })
        .collect()
}

/// A signals-file row. `das`/`drc` columns in the input are ignored; the
/// engine recomputes them.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalsRecord {
    pub snapshot_id: String,
    pub signals: AssuranceSignals,
}

pub fn parse_signals(path: &Path) -> Result<Vec<SignalsRecord>> {
    let text = read_file(path)?;
    parse_signals_str(&text, &display_name(path), TableFormat::from_path(path))
}

pub fn parse_signals_str(text: &str, file: &str, format: TableFormat) -> Result<Vec<SignalsRecord>> {
    let rows = read_rows(text, file, format, &SIGNAL_COLUMNS)?;
    rows.iter()
        .map(|row| {
            let snapshot_id = row.text("snapshot_id");
            if snapshot_id.is_empty() {
                return Err(row.malformed(file, "empty snapshot_id".into()));
            }
            let remediation_event = row.flag(file, "remediation_event")?;
            let r_m = match row.text("r_m") {
                "" => None,
                raw => Some(
                    raw.parse::<f64>()
                        .map_err(|_| row.malformed(file, format!("r_m '{raw}' is not a number")))?,
                ),
            };
            let worst_zone = match row.text("worst_zone") {
                "" => None,
                raw => Some(
                    raw.parse::<ZoneLabel>()
                        .map_err(|e| row.malformed(file, e))?,
                ),
            };
            let signals = AssuranceSignals {
                fdi: row.unit(file, "fdi")?,
                delta_fpr: row.unit(file, "delta_fpr")?,
                delta_fnr: row.unit(file, "delta_fnr")?,
                tsz: row.unit(file, "tsz")?,
                worst_zone,
                remediation_event,
                r_m,
            };
            signals
                .validate()
                .map_err(|e| row.malformed(file, e.to_string()))?;
            Ok(SignalsRecord {
                snapshot_id: snapshot_id.into(),
                signals,
            })
        })
        .collect()
}

/// Writes records in the signals CSV layout (four-decimal reals, plus the
/// optional `r_m` and `worst_zone` columns).
pub fn write_signals(records: &[SignalsRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    let mut header: Vec<&str> = SIGNAL_COLUMNS.to_vec();
    header.extend(["r_m", "worst_zone"]);
    w.write_record(&header).map_err(ser)?;
    for r in records {
        let s = &r.signals;
        w.write_record([
            r.snapshot_id.clone(),
            fixed4(s.fdi),
            fixed4(s.delta_fpr),
            fixed4(s.delta_fnr),
            fixed4(s.tsz),
            u8::from(s.remediation_event).to_string(),
            s.r_m.map(fixed4).unwrap_or_default(),
            s.worst_zone.map(|z| z.to_string()).unwrap_or_default(),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preds(text: &str) -> Result<Vec<Sample>> {
        parse_predictions_str(text, "preds.csv", TableFormat::Csv)
    }

    fn signals(text: &str) -> Result<Vec<SignalsRecord>> {
        parse_signals_str(text, "signals.csv", TableFormat::Csv)
    }

    #[test]
    fn one_prediction_row() {
        let s = preds("sample_id,score,label,subgroup\ns1,0.9,1,A\n").unwrap();
        assert_eq!(s, vec![Sample::new("s1", 0.9, 1, "A").unwrap()]);
    }

    #[test]
    fn out_of_range_score_reports_row() {
        match preds("sample_id,score,label,subgroup\ns2,1.5,1,A\n") {
            Err(Error::MalformedRow { file, row, message }) => {
                assert_eq!(file, "preds.csv");
                assert_eq!(row, 2);
                assert!(message.contains("score"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        assert!(matches!(
            preds("sample_id,score,label,subgroup\n"),
            Err(Error::EmptyFile { .. })
        ));
        assert!(matches!(preds(""), Err(Error::EmptyFile { .. })));
    }

    #[test]
    fn missing_column() {
        match preds("sample_id,score,subgroup\ns1,0.9,A\n") {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, "label"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_label() {
        assert!(matches!(
            preds("sample_id,score,label,subgroup\ns1,0.9,2,A\n"),
            Err(Error::MalformedRow { row: 2, .. })
        ));
    }

    #[test]
    fn predictions_as_json_lines() {
        let text = "{\"sample_id\":\"s1\",\"score\":0.9,\"label\":1,\"subgroup\":\"A\"}\n\n\
                    {\"sample_id\":\"s2\",\"score\":0.2,\"label\":0,\"subgroup\":\"B\"}\n";
        let s = parse_predictions_str(text, "p.jsonl", TableFormat::JsonLines).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].subgroup, "B");
        let bad = "{\"sample_id\":\"s1\",\"score\":0.9,\"subgroup\":\"A\"}\n";
        assert!(matches!(
            parse_predictions_str(bad, "p.jsonl", TableFormat::JsonLines),
            Err(Error::MalformedRow { row: 1, .. })
        ));
    }

    #[test]
    fn baseline_signals_row() {
        let r = signals(
            "snapshot_id,fdi,delta_fpr,delta_fnr,tsz,remediation_event\nbaseline,0.68,0.304,0.694,0.42,0\n",
        )
        .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].snapshot_id, "baseline");
        assert_eq!(
            r[0].signals,
            AssuranceSignals::new(0.68, 0.304, 0.694, 0.42).unwrap()
        );
    }

    #[test]
    fn first_bad_signal_row_wins() {
        let text = "snapshot_id,fdi,delta_fpr,delta_fnr,tsz,remediation_event\n\
                    a,0.1,0.1,0.1,0.1,0\nb,1.2,0.1,0.1,0.1,0\nc,0.1,0.1,-0.1,0.1,0\n";
        match signals(text) {
            Err(Error::MalformedRow { row, message, .. }) => {
                assert_eq!(row, 3);
                assert!(message.contains("fdi"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn das_and_drc_columns_are_ignored() {
        let text = "snapshot_id,fdi,delta_fpr,delta_fnr,tsz,das,drc,remediation_event,r_m\n\
                    bbs,0.41,0.206,0.424,0.28,0.71,Restricted,1,0.23\n";
        let r = signals(text).unwrap();
        assert!(r[0].signals.remediation_event);
        assert_eq!(r[0].signals.r_m, Some(0.23));
    }

    #[test]
    fn r_m_requires_remediation() {
        let text = "snapshot_id,fdi,delta_fpr,delta_fnr,tsz,remediation_event,r_m\n\
                    a,0.1,0.1,0.1,0.1,0,0.2\n";
        assert!(matches!(signals(text), Err(Error::MalformedRow { row: 2, .. })));
    }

    #[test]
    fn signals_round_trip() {
        let text = "snapshot_id,fdi,delta_fpr,delta_fnr,tsz,remediation_event,r_m,worst_zone\n\
                    a,0.6800,0.3040,0.6940,0.4200,0,,\n\
                    b,0.4100,0.2060,0.4240,0.2800,1,-0.0400,GovernanceFragility\n";
        let parsed = signals(text).unwrap();
        assert_eq!(write_signals(&parsed).unwrap(), text);
    }
}
