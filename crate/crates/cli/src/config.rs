//! Run configuration: CLI flags over environment over an optional JSON file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dirac_gaps::PrecisionConfig;
use serde::Deserialize;

use crate::literal::PotentialLiteral;
use crate::CliError;

pub const ENV_PRECISION: &str = "DIRAC_GAPS_PRECISION";
pub const ENV_REL_TOL: &str = "DIRAC_GAPS_REL_TOL";

pub const DEFAULT_DIGITS: usize = 30;
pub const DEFAULT_POTENTIAL: &str = "1,1,1,1";
pub const DEFAULT_RANGE: &str = "3:21";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub start: i64,
    pub end: i64,
}

impl NRange {
    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.start..=self.end
    }
}

impl FromStr for NRange {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Argument(format!("bad n range {s:?}, expected start:end"));
        let (a, b) = match s.split_once(':') {
            Some((a, b)) => (a, b),
            None => (s, s),
        };
        let start: i64 = a.trim().parse().map_err(|_| bad())?;
        let end: i64 = b.trim().parse().map_err(|_| bad())?;
        if start > end {
            return Err(CliError::Argument(format!("empty n range {s:?}")));
        }
        if (start..=end).any(|n| n.abs() < 3) {
            return Err(CliError::Argument(format!("n range {s:?} contains |n| < 3")));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Series,
    Matrix,
    Both,
    Asym,
}

impl FromStr for MethodChoice {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "series" => Ok(Self::Series),
            "matrix" => Ok(Self::Matrix),
            "both" => Ok(Self::Both),
            "asym" | "asymptotic" => Ok(Self::Asym),
            other => Err(CliError::Argument(format!(
                "unknown method {other:?}; expected series, matrix, both or asym"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Argument(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialLiteral,
    pub n_range: NRange,
    pub method: MethodChoice,
    pub precision_bits: u32,
    pub rel_tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub digits: usize,
    /// Modes beyond `|n|` kept by the matrix oracle.
    pub extra_modes: u32,
}

impl RunConfig {
    pub fn precision(&self) -> Result<PrecisionConfig, CliError> {
        PrecisionConfig::new(self.precision_bits, self.rel_tol).map_err(|e| CliError::Argument(e.to_string()))
    }
}

/// The JSON config file; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub potential: Option<String>,
    pub n_range: Option<String>,
    pub method: Option<String>,
    pub precision_bits: Option<u32>,
    pub rel_tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub digits: Option<usize>,
    pub extra_modes: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Argument(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Argument(format!("bad config {}: {e}", path.display())))
    }
}

/// Values given on the command line (or through the environment).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub potential: Option<String>,
    pub n_range: Option<String>,
    pub method: Option<String>,
    pub precision_bits: Option<u32>,
    pub rel_tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub digits: Option<usize>,
    pub extra_modes: Option<u32>,
}

/// Layers `over` on top of `file` on top of the defaults.
pub fn resolve(over: Overrides, file: FileConfig) -> Result<RunConfig, CliError> {
    let potential: PotentialLiteral = over
        .potential
        .or(file.potential)
        .unwrap_or_else(|| DEFAULT_POTENTIAL.into())
        .parse()?;
    let n_range: NRange = over
        .n_range
        .or(file.n_range)
        .unwrap_or_else(|| DEFAULT_RANGE.into())
        .parse()?;
    let method = match over.method.or(file.method) {
        Some(m) => m.parse()?,
        None => MethodChoice::Series,
    };
    let output = over.output.or(file.output);
    let format = match over.format.or(file.format) {
        Some(f) => f.parse()?,
        None => match output.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        },
    };
    let digits = over.digits.or(file.digits).unwrap_or(DEFAULT_DIGITS);
    if !(1..=200).contains(&digits) {
        return Err(CliError::Argument(format!("digits must lie in 1..=200, got {digits}")));
    }
    let cfg = RunConfig {
        potential,
        n_range,
        method,
        precision_bits: over
            .precision_bits
            .or(file.precision_bits)
            .unwrap_or(PrecisionConfig::DEFAULT_BITS),
        rel_tol: over.rel_tol.or(file.rel_tol).unwrap_or(PrecisionConfig::DEFAULT_REL_TOL),
        output,
        format,
        digits,
        extra_modes: over
            .extra_modes
            .or(file.extra_modes)
            .unwrap_or(dirac_gaps::oracle::DEFAULT_EXTRA_MODES),
    };
    cfg.precision()?;
    Ok(cfg)
}
