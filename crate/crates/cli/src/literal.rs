//! Complex literals of the form `re`, `imi`, `re+imi`, `re-imi`.

use std::fmt;
use std::str::FromStr;

use dirac_gaps::{Scalar, TrigPotential};

use crate::CliError;

/// A complex number kept as its two decimal parts, so that values are
/// rounded only once, at the working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexLiteral {
    re: String,
    im: String,
}

impl ComplexLiteral {
    pub fn re(&self) -> &str {
        &self.re
    }

    pub fn im(&self) -> &str {
        &self.im
    }

    pub fn to_scalar(&self, prec: u32) -> Result<Scalar, CliError> {
        Scalar::parse_parts(prec, &self.re, &self.im).map_err(|e| CliError::Argument(e.to_string()))
    }
}

/// `1.50` -> `1.5`, `+2.` -> `2`, `-0` -> `0`, `1E-3` -> `1e-3`.
fn normalize_decimal(s: &str) -> Result<String, String> {
    let s = s.trim().to_ascii_lowercase();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(&s)),
    };
    if body.is_empty() {
        return Err("empty number".into());
    }
    let (mantissa, exponent) = match body.split_once('e') {
        Some((m, e)) => (m, Some(e)),
        None => (body, None),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
        return Err(format!("malformed number {s:?}"));
    }
    let int = int.trim_start_matches('0');
    let int = if int.is_empty() { "0" } else { int };
    let frac = frac.trim_end_matches('0');
    let mut out = String::from(int);
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    let zero = out.chars().all(|c| c == '0' || c == '.');
    if let Some(e) = exponent {
        let e: i64 = e.parse().map_err(|_| format!("malformed exponent in {s:?}"))?;
        if e != 0 && !zero {
            out.push_str(&format!("e{e}"));
        }
    }
    if neg && !zero {
        out.insert(0, '-');
    }
    Ok(out)
}

impl FromStr for ComplexLiteral {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: String| CliError::Argument(format!("bad complex literal {s:?}: {why}"));
        let t = s.trim();
        if t.is_empty() || t.contains(char::is_whitespace) {
            return Err(bad("expected re+imi without spaces".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Self {
                re: normalize_decimal(t).map_err(bad)?,
                im: "0".into(),
            });
        };
        // the split is the last sign that does not start the literal or an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        Ok(Self {
            re: normalize_decimal(re).map_err(bad)?,
            im: normalize_decimal(im).map_err(bad)?,
        })
    }
}

impl fmt::Display for ComplexLiteral {
    /// Canonical form: the real part alone when the imaginary part is zero,
    /// otherwise `re+imi` / `re-imi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == "0" {
            return f.write_str(&self.re);
        }
        match self.im.strip_prefix('-') {
            Some(mag) => write!(f, "{}-{}i", self.re, mag),
            None => write!(f, "{}+{}i", self.re, self.im),
        }
    }
}

/// Four comma-separated literals in the order a, A, b, B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialLiteral(pub [ComplexLiteral; 4]);

impl PotentialLiteral {
    pub fn to_potential(&self, prec: u32) -> Result<TrigPotential, CliError> {
        let [a, aa, b, bb] = &self.0;
        Ok(TrigPotential::new(
            a.to_scalar(prec)?,
            aa.to_scalar(prec)?,
            b.to_scalar(prec)?,
            bb.to_scalar(prec)?,
        ))
    }
}

impl FromStr for PotentialLiteral {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::Argument(format!(
                "potential needs four comma-separated values a,A,b,B, got {s:?}"
            )));
        }
        let mut lits = Vec::with_capacity(4);
        for p in parts {
            lits.push(p.parse::<ComplexLiteral>()?);
        }
        let arr: [ComplexLiteral; 4] = lits.try_into().expect("four parts");
        Ok(Self(arr))
    }
}

impl fmt::Display for PotentialLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "{a},{b},{c},{d}")
    }
}
