//! File and text formats: measure files (JSON and CSV), fixed-precision
//! number rendering, certificates, verification reports and scan tables.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bounds::TvCertificate;
use crate::error::Error;
use crate::extended::ExtendedReal;
use crate::jointrange::{ScanRecord, VerificationReport};
use crate::measure::{HahnDecomposition, ProbabilityMeasure, SignedMeasure};
use crate::scalar::Scalar;

/// Significant digits used when no precision is requested.
pub const DEFAULT_PRECISION: usize = 9;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON measure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV measure: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Measure(#[from] Error),
}

/// On-disk measure encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureFormat {
    /// `{"atoms": [{"id": "a1", "w": 0.5}, ...]}`
    Json,
    /// Two columns `id,w` under a header row.
    Csv,
}

impl MeasureFormat {
    /// `.csv` and `.json` by extension, otherwise JSON iff the text opens with `{`.
    pub fn detect(path: Option<&Path>, text: &str) -> Self {
        match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => MeasureFormat::Csv,
            Some(e) if e.eq_ignore_ascii_case("json") => MeasureFormat::Json,
            _ if text.trim_start().starts_with('{') => MeasureFormat::Json,
            _ => MeasureFormat::Csv,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    atoms: Vec<AtomDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    id: String,
    w: f64,
}

#[derive(Deserialize)]
struct CsvRow {
    id: String,
    w: String,
}

fn parse_weight(id: &str, raw: &str) -> Result<f64, FormatError> {
    let w: f64 = raw.trim().parse().map_err(|_| {
        FormatError::Invalid(format!("atom {id:?}: weight {raw:?} is not a number"))
    })?;
    if !w.is_finite() {
        return Err(FormatError::Invalid(format!(
            "atom {id:?}: weight {raw:?} is not finite"
        )));
    }
    Ok(w)
}

/// Reads `(id, weight)` pairs; weights must be finite. Duplicate ids are
/// rejected by the measure constructors.
pub fn parse_atoms(text: &str, format: MeasureFormat) -> Result<Vec<(String, f64)>, FormatError> {
    match format {
        MeasureFormat::Json => {
            let doc: MeasureDoc = serde_json::from_str(text)?;
            doc.atoms
                .into_iter()
                .map(|a| {
                    if a.w.is_finite() {
                        Ok((a.id, a.w))
                    } else {
                        Err(FormatError::Invalid(format!(
                            "atom {:?}: weight is not finite",
                            a.id
                        )))
                    }
                })
                .collect()
        }
        MeasureFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            let headers = reader.headers()?.clone();
            if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "w" {
                return Err(FormatError::Invalid(format!(
                    "expected CSV header `id,w`, got `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                )));
            }
            reader
                .deserialize::<CsvRow>()
                .map(|row| {
                    let row = row?;
                    let w = parse_weight(&row.id, &row.w)?;
                    Ok((row.id, w))
                })
                .collect()
        }
    }
}

pub fn parse_signed<T: Scalar>(
    text: &str,
    format: MeasureFormat,
) -> Result<SignedMeasure<T>, FormatError> {
    let atoms = parse_atoms(text, format)?;
    Ok(SignedMeasure::new(
        atoms.into_iter().map(|(id, w)| (id, T::lit(w))),
    )?)
}

pub fn parse_probability<T: Scalar>(
    text: &str,
    format: MeasureFormat,
) -> Result<ProbabilityMeasure<T>, FormatError> {
    let atoms = parse_atoms(text, format)?;
    Ok(ProbabilityMeasure::new(
        atoms.into_iter().map(|(id, w)| (id, T::lit(w))),
    )?)
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_signed<T: Scalar>(path: &Path) -> Result<SignedMeasure<T>, FormatError> {
    let text = read(path)?;
    parse_signed(&text, MeasureFormat::detect(Some(path), &text))
}

pub fn read_probability<T: Scalar>(path: &Path) -> Result<ProbabilityMeasure<T>, FormatError> {
    let text = read(path)?;
    parse_probability(&text, MeasureFormat::detect(Some(path), &text))
}

/// `x` with `digits` significant digits, `%g`-style: trailing zeros dropped,
/// scientific notation outside `1e-5 ≤ |x| < 10^digits`. Non-finite values
/// print as `inf`, `-inf`, `nan`.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x.is_finite() {
        format_sig(x, digits)
            .parse()
            .expect("formatted float parses")
    } else {
        x
    }
}

/// A JSON number rounded to `digits`, or the string `"inf"` / `"-inf"`.
pub fn json_number(x: f64, digits: usize) -> Value {
    if x.is_finite() {
        json!(round_sig(x, digits))
    } else {
        Value::String(format_sig(x, digits))
    }
}

pub fn json_extended<T: Scalar>(x: ExtendedReal<T>, digits: usize) -> Value {
    json_number(x.to_float().as_f64(), digits)
}

/// Text form of an extended real: `inf` or the rounded number.
pub fn format_extended<T: Scalar>(x: ExtendedReal<T>, digits: usize) -> String {
    format_sig(x.to_float().as_f64(), digits)
}

pub fn measure_json<T: Scalar>(m: &SignedMeasure<T>, digits: usize) -> Value {
    let atoms: Vec<Value> = m
        .atoms()
        .iter()
        .map(|(id, w)| json!({ "id": id, "w": json_number(w.as_f64(), digits) }))
        .collect();
    json!({ "atoms": atoms })
}

pub fn certificate_json<T: Scalar>(c: &TvCertificate<T>, digits: usize) -> Value {
    json!({
        "divergence": c.divergence_name,
        "value": json_extended(c.divergence_value, digits),
        "tv_upper_bound": json_number(c.tv_upper_bound.as_f64(), digits),
        "method": serde_json::to_value(c.method).expect("method serializes"),
    })
}

/// Parses certificate JSON as printed by [`certificate_json`].
pub fn parse_certificate(text: &str) -> Result<TvCertificate<f64>, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn report_json<T: Scalar>(r: &VerificationReport<T>, digits: usize) -> Value {
    json!({
        "generator": r.generator_name,
        "trials": r.trials,
        "max_support": r.max_support,
        "seed": r.seed,
        "max_violation": json_number(r.max_violation.as_f64(), digits),
        "passed": r.passed(),
        "worst_trial": r.worst_trial,
        "worst_pair": {
            "mu": measure_json(r.worst_pair.0.as_signed(), digits),
            "nu": measure_json(r.worst_pair.1.as_signed(), digits),
        },
    })
}

pub fn decomposition_json<T: Scalar>(h: &HahnDecomposition<T>, digits: usize) -> Value {
    let mut obj = Map::new();
    obj.insert("positive".into(), json!(h.positive));
    obj.insert("negative".into(), json!(h.negative));
    obj.insert("upper".into(), measure_json(&h.upper, digits));
    obj.insert("lower".into(), measure_json(&h.lower, digits));
    obj.insert(
        "upper_mass".into(),
        json_number(h.upper_mass().as_f64(), digits),
    );
    obj.insert(
        "lower_mass".into(),
        json_number(h.lower_mass().as_f64(), digits),
    );
    obj.insert(
        "total_variation".into(),
        json_number((h.upper_mass() + h.lower_mass()).as_f64(), digits),
    );
    Value::Object(obj)
}

/// Column order of the scan table.
pub const SCAN_COLUMNS: [&str; 6] = ["p", "q", "tv", "divergence", "lower_bound", "slack"];

pub fn scan_row<T: Scalar>(r: &ScanRecord<T>, digits: usize) -> [String; 6] {
    [
        format_sig(r.p.as_f64(), digits),
        format_sig(r.q.as_f64(), digits),
        format_sig(r.tv.as_f64(), digits),
        format_extended(r.divergence, digits),
        format_extended(r.lower_bound, digits),
        format_sig(r.slack.as_f64(), digits),
    ]
}

/// The scan table as CSV text with a header row.
pub fn scan_csv<T: Scalar>(records: &[ScanRecord<T>], digits: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCAN_COLUMNS).expect("write to memory");
    for r in records {
        w.write_record(scan_row(r, digits))
            .expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}
