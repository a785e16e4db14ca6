//! Text output shared by CSV and JSON writers. Floats carry 17 significant
//! digits; non-finite values become `null` in JSON.

use serde::Serializer;
use serde_json::value::RawValue;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format_float(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// A float that serializes to JSON with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl serde::Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        json_f64(&self.0, s)
    }
}

/// `serialize_with` helper for `f64` fields.
pub fn json_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&raw(*x))
}

pub fn json_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => json_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn json_f64_seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| raw(x)))
}

pub fn json_f64_pairs<S: Serializer>(xs: &[[f64; 2]], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|p| [raw(p[0]), raw(p[1])]))
}

/// Comma-separated text with a header row and LF line endings.
pub fn csv_text<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.as_ref().join(","));
        out.push('\n');
    }
    out
}
