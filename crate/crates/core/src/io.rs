//! File formats: JSON measures, moment vectors and laws in, JSON reports and
//! CSV scans out.
//!
//! Numbers in input files may be JSON numbers or strings. A file whose values
//! are all strings (`"1/3"`, `"0.2"`, `"1"`) is read exactly; a single JSON
//! number makes the whole file floating point.

use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::harness::{ScanRow, ScanSummary};
use crate::model::{MixingMeasure, MomentVector, SampleMeanLaw};
use crate::numerics::ResolvedBackend;
use crate::recovery::RecoveredMeasure;
use crate::value::{parse_rational, Probability};

/// A list of scalars that is either entirely exact or entirely float.
enum Scalars {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

fn parse_scalars(values: &[&Value], what: &str) -> Result<Scalars> {
    if values.iter().all(|v| v.is_string()) {
        let exact = values
            .iter()
            .map(|v| parse_rational(v.as_str().expect("checked string")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Scalars::Exact(exact));
    }
    let float = values
        .iter()
        .map(|v| match v {
            Value::Number(x) => x
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("{what}: bad number {x}"))),
            Value::String(s) => parse_rational(s).map(|r| crate::value::rational_to_f64(&r)),
            other => Err(Error::Parse(format!(
                "{what}: expected a number or string, got {other}"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scalars::Float(float))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

fn array_field<'a>(doc: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    doc.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("expected an object with an array field {key:?}")))
}

/// `{"atoms": [{"p": ..., "w": ...}, ...]}`
pub fn parse_measure(text: &str) -> Result<MixingMeasure> {
    let doc = parse_json(text)?;
    let atoms = array_field(&doc, "atoms")?;
    let mut ps = Vec::with_capacity(atoms.len());
    let mut ws = Vec::with_capacity(atoms.len());
    for (j, atom) in atoms.iter().enumerate() {
        let p = atom
            .get("p")
            .ok_or_else(|| Error::Parse(format!("atom {j} has no \"p\"")))?;
        let w = atom
            .get("w")
            .ok_or_else(|| Error::Parse(format!("atom {j} has no \"w\"")))?;
        ps.push(p);
        ws.push(w);
    }
    let all: Vec<&Value> = ps.iter().chain(ws.iter()).copied().collect();
    match parse_scalars(&all, "atoms")? {
        Scalars::Exact(v) => {
            let (p, w) = v.split_at(ps.len());
            MixingMeasure::exact(p.iter().cloned().zip(w.iter().cloned()).collect())
        }
        Scalars::Float(v) => {
            let (p, w) = v.split_at(ps.len());
            MixingMeasure::float(p.iter().copied().zip(w.iter().copied()).collect())
        }
    }
}

/// `{"c": [1, ...]}`
pub fn parse_moments(text: &str) -> Result<MomentVector> {
    let doc = parse_json(text)?;
    let values: Vec<&Value> = array_field(&doc, "c")?.iter().collect();
    match parse_scalars(&values, "c")? {
        Scalars::Exact(c) => MomentVector::exact(c),
        Scalars::Float(c) => MomentVector::float(c),
    }
}

/// `{"q": [q_0, ..., q_N]}`
pub fn parse_law(text: &str) -> Result<SampleMeanLaw> {
    let doc = parse_json(text)?;
    let values: Vec<&Value> = array_field(&doc, "q")?.iter().collect();
    match parse_scalars(&values, "q")? {
        Scalars::Exact(q) => SampleMeanLaw::from_exact(q),
        Scalars::Float(q) => SampleMeanLaw::from_float(q),
    }
}

pub fn measure_json(mu: &MixingMeasure) -> Value {
    let atoms: Vec<Value> = mu.atoms().iter().map(|a| json!({"p": a.p, "w": a.w})).collect();
    json!({ "atoms": atoms })
}

/// The input measure format plus `"level"` and `"source"`.
pub fn recovered_json(rec: &RecoveredMeasure) -> Value {
    let mut doc = measure_json(&rec.measure);
    doc["level"] = json!(rec.level);
    doc["source"] = json!(rec.source);
    doc
}

pub fn law_json(law: &SampleMeanLaw) -> Value {
    json!({ "N": law.n(), "q": law.weights_real() })
}

/// Compact single-line JSON; map keys keep declaration order, so equal
/// inputs give byte-identical output.
pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

/// Header of the scan CSV. Log-space scans carry natural logs, marked in the column names.
pub fn scan_csv_header(backend: ResolvedBackend) -> &'static str {
    match backend {
        ResolvedBackend::Exact => "i,a,b,ratio,region",
        ResolvedBackend::Log => "i,ln_a,ln_b,ln_ratio,region",
    }
}

fn csv_cell(p: &Probability) -> String {
    match p {
        Probability::Exact(r) => r.to_string(),
        Probability::Log(l) if l.is_zero() => "-inf".to_string(),
        Probability::Log(l) => l.ln().to_string(),
    }
}

pub fn scan_csv_row(row: &ScanRow) -> String {
    format!(
        "{},{},{},{},{}",
        row.i,
        csv_cell(&row.a),
        csv_cell(&row.b),
        row.ratio.as_ref().map(csv_cell).unwrap_or_default(),
        row.region.as_str()
    )
}

/// Trailing line of a scan: the summary as one JSON object.
pub fn scan_summary_line(summary: &ScanSummary) -> String {
    to_json_line(summary)
}

/// Writes a whole scan as CSV: header, rows, summary line.
pub fn write_scan_csv(out: &mut impl Write, summary: &ScanSummary, rows: &[ScanRow]) -> std::io::Result<()> {
    writeln!(out, "{}", scan_csv_header(summary.backend))?;
    for row in rows {
        writeln!(out, "{}", scan_csv_row(row))?;
    }
    writeln!(out, "{}", scan_summary_line(summary))
}
