//! The gap table: one row per `n` and method, rendered as CSV or JSON.

use dirac_gaps::scalar::format_sci;
use rug::Float;
use serde::Serialize;

use crate::config::Format;
use crate::CliError;

pub const HEADER: [&str; 15] = [
    "n",
    "method",
    "precision_bits",
    "lambda_minus_re",
    "lambda_minus_im",
    "lambda_plus_re",
    "lambda_plus_im",
    "gamma_re",
    "gamma_im",
    "gamma_abs",
    "pred_gamma_abs",
    "ratio_sq",
    "err_est",
    "iterations",
    "status",
];

/// Numbers are pre-rendered decimal strings; empty when not applicable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Row {
    pub n: i64,
    pub method: String,
    pub precision_bits: u32,
    pub lambda_minus_re: String,
    pub lambda_minus_im: String,
    pub lambda_plus_re: String,
    pub lambda_plus_im: String,
    pub gamma_re: String,
    pub gamma_im: String,
    pub gamma_abs: String,
    pub pred_gamma_abs: String,
    pub ratio_sq: String,
    pub err_est: String,
    pub iterations: Option<usize>,
    pub status: String,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn sci(x: &Float, digits: usize) -> String {
    format_sci(x, digits)
}

/// f64 diagnostics carry at most 17 meaningful digits.
pub fn sci_f64(x: f64, digits: usize) -> String {
    format_sci(&Float::with_val(53, x), digits.min(17))
}

pub fn render(rows: &[Row], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
            if rows.is_empty() {
                w.write_record(HEADER).map_err(|e| CliError::Io(e.to_string()))?;
            }
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Row {
        Row {
            n: 5,
            method: "series".into(),
            precision_bits: 256,
            gamma_abs: sci(&Float::with_val(64, 0.125), 4),
            iterations: Some(7),
            status: "ok".into(),
            ..Default::default()
        }
    }

    #[test]
    fn csv_header_is_fixed() {
        let out = render(&[sample()], Format::Csv).unwrap();
        let first = out.lines().next().unwrap();
        assert_eq!(first, HEADER.join(","));
        assert!(out.lines().nth(1).unwrap().starts_with("5,series,256,"));
        assert!(out.contains("1.250e-1"));
        let empty = render(&[], Format::Csv).unwrap();
        assert_eq!(empty.trim_end(), HEADER.join(","));
    }

    #[test]
    fn json_uses_same_names() {
        let out = render(&[sample()], Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let obj = v[0].as_object().unwrap();
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        let mut want = HEADER.to_vec();
        want.sort_unstable();
        let mut got = keys.clone();
        got.sort_unstable();
        assert_eq!(got, want);
        assert_eq!(obj["iterations"], 7);
    }

    #[test]
    fn f64_rendering() {
        assert_eq!(sci_f64(1.5e-40, 3), "1.50e-40");
        assert_eq!(sci_f64(0.0, 3), "0.00e0");
    }
}
