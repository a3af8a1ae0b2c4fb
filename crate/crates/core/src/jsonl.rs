//! Artifact file formats: label files, teacher logit files, parameter
//! files, prediction files, and evaluation reports. Floats are printed with
//! 9 significant digits so that re-running a command reproduces files
//! byte for byte.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::inventory::EmotionInventory;
use crate::label::{GrayscaleLabel, LabelMethod};
use crate::metrics::EvalResult;
use crate::model::{ModelParams, SampleLogits};

/// Formats a float with 9 significant digits, in fixed notation where the
/// exponent allows it and scientific notation otherwise, with trailing
/// zeros trimmed. The output parses back to a value that formats
/// identically, so serialization is stable under reload.
pub fn fmt_g9(x: f64) -> String {
    assert!(x.is_finite(), "cannot serialize non-finite float {x}");
    if x == 0.0 {
        return "0".to_string();
    }
    let (sign, magnitude) = if x < 0.0 { ("-", -x) } else { ("", x) };
    let sci = format!("{magnitude:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponential format");
    let exponent: i32 = exponent.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 9);
    let body = if (-4..9).contains(&exponent) {
        if exponent >= 0 {
            let split = (exponent + 1) as usize;
            let int_part = &digits[..split];
            let frac_part = digits[split..].trim_end_matches('0');
            if frac_part.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{frac_part}")
            }
        } else {
            let zeros = "0".repeat((-exponent - 1) as usize);
            let frac = format!("{zeros}{digits}");
            format!("0.{}", frac.trim_end_matches('0'))
        }
    } else {
        let int_part = &digits[..1];
        let frac_part = digits[1..].trim_end_matches('0');
        if frac_part.is_empty() {
            format!("{int_part}e{exponent}")
        } else {
            format!("{int_part}.{frac_part}e{exponent}")
        }
    };
    format!("{sign}{body}")
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

fn float_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| fmt_g9(*v))
        .collect::<Vec<_>>()
        .join(",")
}

fn schema_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = std::fs::File::open(path)?;
    let mut rows = Vec::new();
    for (line_no, line) in BufReader::new(file).lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: T = serde_json::from_str(&line)
            .map_err(|e| schema_err(path, line_no, e.to_string()))?;
        rows.push((line_no, row));
    }
    Ok(rows)
}

/// One row of a label file.
#[derive(Clone, Debug)]
pub struct LabelRecord {
    pub sample_id: String,
    pub label: GrayscaleLabel,
}

/// Writes labels as JSON lines `{"sample_id":...,"method":...,"probs":[...]}`.
pub fn write_labels<'a>(
    path: &Path,
    records: impl IntoIterator<Item = (&'a str, &'a GrayscaleLabel)>,
) -> Result<()> {
    let mut out = Vec::new();
    for (sample_id, label) in records {
        writeln!(
            out,
            "{{\"sample_id\":{},\"method\":{},\"probs\":[{}]}}",
            json_str(sample_id),
            json_str(label.method().as_str()),
            float_list(label.probs())
        )?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// How far a stored label's sum may drift from 1 before the row counts as
/// corrupt rather than a victim of 9-significant-digit rounding.
const STORED_SUM_TOLERANCE: f64 = 1e-6;

/// Reads a label file, validating every row against the simplex rules.
/// Duplicate sample ids are rejected. Because probabilities are stored
/// with 9 significant digits, a row's sum may drift from 1 by a few parts
/// in 1e9; such rows are renormalized, while larger deviations are
/// rejected as corrupt.
pub fn read_labels(path: &Path) -> Result<Vec<LabelRecord>> {
    #[derive(Deserialize)]
    struct Row {
        sample_id: String,
        method: String,
        probs: Vec<f64>,
    }
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (line_no, row) in read_jsonl::<Row>(path)? {
        if !seen.insert(row.sample_id.clone()) {
            return Err(schema_err(
                path,
                line_no,
                format!("duplicate sample id {:?}", row.sample_id),
            ));
        }
        let method: LabelMethod = row
            .method
            .parse()
            .map_err(|e: Error| schema_err(path, line_no, e.to_string()))?;
        let mut probs = row.probs;
        if probs.iter().all(|p| p.is_finite() && *p >= 0.0) {
            let sum: f64 = probs.iter().sum();
            let drift = (sum - 1.0).abs();
            if drift > crate::label::SIMPLEX_TOLERANCE && drift <= STORED_SUM_TOLERANCE {
                for p in &mut probs {
                    *p /= sum;
                }
            }
        }
        let label = GrayscaleLabel::new(probs, method)
            .map_err(|e| schema_err(path, line_no, e.to_string()))?;
        records.push(LabelRecord {
            sample_id: row.sample_id,
            label,
        });
    }
    Ok(records)
}

/// Writes teacher logits as JSON lines `{"sample_id":...,"logits":[...]}`.
pub fn write_teacher_logits(path: &Path, logits: &[SampleLogits]) -> Result<()> {
    let mut out = Vec::new();
    for row in logits {
        writeln!(
            out,
            "{{\"sample_id\":{},\"logits\":[{}]}}",
            json_str(&row.sample_id),
            float_list(&row.logits)
        )?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a teacher logit file. Duplicate sample ids are rejected; every row
/// must have the same number of logits.
pub fn read_teacher_logits(path: &Path) -> Result<Vec<SampleLogits>> {
    #[derive(Deserialize)]
    struct Row {
        sample_id: String,
        logits: Vec<f64>,
    }
    let mut seen = HashSet::new();
    let mut records: Vec<SampleLogits> = Vec::new();
    for (line_no, row) in read_jsonl::<Row>(path)? {
        if !seen.insert(row.sample_id.clone()) {
            return Err(schema_err(
                path,
                line_no,
                format!("duplicate sample id {:?}", row.sample_id),
            ));
        }
        if row.logits.is_empty() {
            return Err(schema_err(path, line_no, "empty logit vector"));
        }
        if let Some(prev) = records.first() {
            if row.logits.len() != prev.logits.len() {
                return Err(schema_err(
                    path,
                    line_no,
                    format!(
                        "logit vector has length {}, expected {}",
                        row.logits.len(),
                        prev.logits.len()
                    ),
                ));
            }
        }
        if let Some((i, l)) = row.logits.iter().enumerate().find(|(_, l)| !l.is_finite()) {
            return Err(schema_err(
                path,
                line_no,
                format!("logit {i} is not finite: {l}"),
            ));
        }
        records.push(SampleLogits {
            sample_id: row.sample_id,
            logits: row.logits,
        });
    }
    Ok(records)
}

/// Writes model parameters as a single JSON object
/// `{"dim":...,"k":...,"weights":[...],"bias":[...]}` with row-major weights.
pub fn write_params(path: &Path, params: &ModelParams) -> Result<()> {
    let text = format!(
        "{{\"dim\":{},\"k\":{},\"weights\":[{}],\"bias\":[{}]}}\n",
        params.dim(),
        params.k(),
        float_list(params.weights()),
        float_list(params.bias())
    );
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a parameter file written by [`write_params`].
pub fn read_params(path: &Path) -> Result<ModelParams> {
    #[derive(Deserialize)]
    struct File {
        dim: usize,
        k: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    }
    let text = std::fs::read_to_string(path)?;
    let file: File = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    ModelParams::from_parts(file.k, file.dim, file.weights, file.bias)
        .map_err(|e| schema_err(path, 1, e.to_string()))
}

/// One test-time prediction, carrying how many future turns the rendered
/// input actually used (always 0 for student inference).
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub gold: usize,
    pub pred: usize,
    pub future_turns_used: usize,
}

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    let mut out = Vec::new();
    for r in records {
        writeln!(
            out,
            "{{\"sample_id\":{},\"gold\":{},\"pred\":{},\"future_turns_used\":{}}}",
            json_str(&r.sample_id),
            r.gold,
            r.pred,
            r.future_turns_used
        )?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    Ok(read_jsonl::<PredictionRecord>(path)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

/// Writes an evaluation report as pretty-printed JSON with per-class F1
/// (null when undefined), supports, and the full confusion matrix.
pub fn write_eval_report(
    path: &Path,
    result: &EvalResult,
    inventory: &EmotionInventory,
) -> Result<()> {
    std::fs::write(path, render_eval_report(result, inventory)?)?;
    Ok(())
}

/// Renders the report text; see [`write_eval_report`].
pub fn render_eval_report(result: &EvalResult, inventory: &EmotionInventory) -> Result<String> {
    if inventory.k() != result.confusion.k() {
        return Err(Error::InvalidInput(format!(
            "inventory has {} emotions, confusion matrix has {}",
            inventory.k(),
            result.confusion.k()
        )));
    }
    let fmt_opt = |v: Option<f64>| v.map_or("null".to_string(), fmt_g9);
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str(&format!(
        "  \"weighted_f1\": {},\n",
        fmt_opt(result.weighted_f1)
    ));
    s.push_str(&format!("  \"macro_f1\": {},\n", fmt_opt(result.macro_f1)));
    s.push_str(&format!("  \"micro_f1\": {},\n", fmt_opt(result.micro_f1)));
    let excluded: Vec<String> = result
        .excluded
        .iter()
        .map(|i| {
            inventory
                .name(*i)
                .map(json_str)
                .ok_or_else(|| Error::InvalidInput(format!("excluded index {i} out of range")))
        })
        .collect::<Result<_>>()?;
    s.push_str(&format!("  \"excluded\": [{}],\n", excluded.join(", ")));
    s.push_str("  \"per_class\": [\n");
    for i in 0..inventory.k() {
        let name = inventory.name(i).expect("checked k");
        let comma = if i + 1 < inventory.k() { "," } else { "" };
        s.push_str(&format!(
            "    {{\"emotion\": {}, \"f1\": {}, \"support\": {}}}{comma}\n",
            json_str(name),
            fmt_opt(result.per_class_f1[i]),
            result.confusion.support(i)
        ));
    }
    s.push_str("  ],\n");
    s.push_str("  \"confusion\": [\n");
    for g in 0..result.confusion.k() {
        let row: Vec<String> = (0..result.confusion.k())
            .map(|p| result.confusion.count(g, p).to_string())
            .collect();
        let comma = if g + 1 < result.confusion.k() { "," } else { "" };
        s.push_str(&format!("    [{}]{comma}\n", row.join(", ")));
    }
    s.push_str("  ]\n}\n");
    Ok(s)
}
