//! Large-`n` closed forms for the eigenvalue pair and the gap, and reports
//! comparing them with computed pairs.
//!
//! The gap is only known up to the sign of a square root, so every
//! comparison goes through `gamma^2`.

use rug::Float;

use crate::error::{Error, Result};
use crate::potential::TrigPotential;
use crate::scalar::{closed_form_denominator, euler_gamma, PrecisionConfig, Scalar};
use crate::series::phi;
use crate::solver::{Method, SpectralPair};

/// Boundedness slack used by [`DeviationReport`] trend flags: `e_gap(m)`
/// may not exceed this multiple of `max(e_gap(3), e_gap(4))`.
pub const GAP_TREND_FACTOR: f64 = 3.0;

/// Slack for `e_lambda(n)` relative to its value at the smallest reported
/// `|n|` of the same sign.
pub const LAMBDA_TREND_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GapPrediction {
    pub n: i64,
    pub predicted_gamma_squared: Scalar,
    pub predicted_gamma_abs: Float,
    pub predicted_lambda: Scalar,
    /// Powers of `Ab` and `aB` in `predicted_gamma_squared`; `(0, 0)` for even `n`.
    pub bracket_exponents: (u32, u32),
}

fn check_index(n: i64) -> Result<()> {
    if n.abs() < 3 {
        return Err(Error::InvalidArgument(format!("need |n| >= 3, got {n}")));
    }
    Ok(())
}

fn lambda_formula(n: i64, v: &TrigPotential) -> Scalar {
    let prec = v.prec();
    let ab = v.ab_upper_lower();
    let ba = v.ab_lower_upper();
    let first = &(&ab + &ba) / &Scalar::from_int(prec, 2 * n);
    let second = &(&ba - &ab) / &Scalar::from_int(prec, 2 * n * n);
    &(&Scalar::from_int(prec, n) + &first) + &second
}

/// `n + (Ab + aB) / 2n + (aB - Ab) / 2n^2`.
pub fn predict_lambda(n: i64, v: &TrigPotential) -> Result<Scalar> {
    check_index(n)?;
    v.require_nonzero()?;
    Ok(lambda_formula(n, v))
}

/// Predicted gap: `gamma^2 = 4 (Ab)^s (aB)^t / (4^{2m} (m!)^2)^2` with
/// `(s, t) = (m, m+1)` for `n = 2m+1` and `(m+1, m)` for `n = -(2m+1)`;
/// zero for even `n`.
pub fn predict_gap(n: i64, v: &TrigPotential) -> Result<GapPrediction> {
    check_index(n)?;
    let prec = v.prec();
    if n % 2 == 0 {
        return Ok(GapPrediction {
            n,
            predicted_gamma_squared: Scalar::zero(prec),
            predicted_gamma_abs: Float::new(prec),
            predicted_lambda: lambda_formula(n, v),
            bracket_exponents: (0, 0),
        });
    }
    v.require_nonzero()?;
    let m = ((n.unsigned_abs() - 1) / 2) as u32;
    let (s, t) = if n > 0 { (m, m + 1) } else { (m + 1, m) };
    let ab = v.ab_upper_lower();
    let ba = v.ab_lower_upper();
    let den = closed_form_denominator(prec, m);
    let den_sq = Float::with_val(prec, den.square_ref());
    let num = &ab.powi(s) * &ba.powi(t);
    let predicted_gamma_squared = num.scale_int(4).scale(&den_sq.recip());
    // |Ab|^{s/2} |aB|^{t/2}, exponentiated in the reals to avoid branch issues
    let half = |x: &Scalar, e: u32| -> Float {
        let l = Float::with_val(prec, x.abs().ln()) * e / 2u32;
        l.exp()
    };
    let predicted_gamma_abs = Float::with_val(prec, half(&ab, s) * half(&ba, t)) * 2u32 / den;
    Ok(GapPrediction {
        n,
        predicted_gamma_squared,
        predicted_gamma_abs,
        predicted_lambda: lambda_formula(n, v),
        bracket_exponents: (s, t),
    })
}

/// One row of a [`DeviationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub n: i64,
    /// `(|n| - 1) / 2` for odd `n`.
    pub m: Option<u32>,
    pub method: Method,
    pub gamma_abs: f64,
    pub predicted_gamma_abs: f64,
    /// `gamma^2 / predicted_gamma_squared`; `None` for even `n`.
    pub ratio_sq: Option<Scalar>,
    /// `|ratio_sq - 1| m^2 / log^2 m`, for `m >= 2`.
    pub e_gap: Option<f64>,
    /// `|lambda^+ - predict_lambda(n)| |n|^3`.
    pub e_lambda: Option<f64>,
    /// `Phi(n, 0) 8m / ((Ab + aB)(log m + g))`, for `m >= 2`.
    pub phi_check: Option<Scalar>,
    pub gap_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub rows: Vec<DeviationRow>,
    /// Rows whose `e_gap` exceeds [`GAP_TREND_FACTOR`] times the larger of
    /// the `m = 3, 4` values of the same sign.
    pub gap_trend_violations: Vec<i64>,
    /// Rows whose `e_lambda` exceeds [`LAMBDA_TREND_FACTOR`] times the value
    /// at the smallest `|n|` of the same sign.
    pub lambda_trend_violations: Vec<i64>,
}

impl DeviationReport {
    pub fn row(&self, n: i64) -> Option<&DeviationRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn is_bounded(&self) -> bool {
        self.gap_trend_violations.is_empty() && self.lambda_trend_violations.is_empty()
    }
}

/// `e_gap(m)` and the other diagnostics for each pair, plus boundedness flags.
pub fn deviation_report(pairs: &[SpectralPair], v: &TrigPotential, cfg: &PrecisionConfig) -> DeviationReport {
    let prec = cfg.precision_bits();
    let v = v.with_prec(prec);
    let nonzero = v.is_fully_nonzero();
    let g = euler_gamma(prec);
    let rows: Vec<DeviationRow> = pairs
        .iter()
        .map(|pair| {
            let n = pair.n;
            let odd = n % 2 != 0;
            let m = odd.then(|| ((n.unsigned_abs() - 1) / 2) as u32);
            let gamma_abs = pair.gamma.abs_f64();
            let pred = if nonzero || !odd { predict_gap(n, &v).ok() } else { None };
            let ratio_sq = match (&pred, odd) {
                (Some(p), true) if !p.predicted_gamma_squared.is_zero() => {
                    Some(&pair.gamma_squared().with_prec(prec) / &p.predicted_gamma_squared)
                }
                _ => None,
            };
            let log_m = |m: u32| Float::with_val(prec, m).ln();
            let e_gap = match (&ratio_sq, m) {
                (Some(r), Some(m)) if m >= 2 => {
                    let dev = (r - &Scalar::one(prec)).abs();
                    let l = log_m(m);
                    let l2 = Float::with_val(prec, l.square_ref());
                    Some((Float::with_val(prec, dev * (m * m)) / l2).to_f64())
                }
                _ => None,
            };
            let e_lambda = nonzero.then(|| {
                let target = lambda_formula(n, &v);
                let d = (&pair.lambda_plus.with_prec(prec) - &target).abs_f64();
                d * (n.abs() as f64).powi(3)
            });
            let phi_check = match m {
                Some(m) if m >= 2 && nonzero => phi(n, &Scalar::zero(prec), &v).ok().map(|(value, _)| {
                    let sum = &v.ab_upper_lower() + &v.ab_lower_upper();
                    let l = Float::with_val(prec, log_m(m) + &g);
                    let den = sum.scale(&l);
                    (&value.scale_int(8 * m as i64)) / &den
                }),
                _ => None,
            };
            DeviationRow {
                n,
                m,
                method: pair.method,
                gamma_abs,
                predicted_gamma_abs: pred.as_ref().map_or(0.0, |p| p.predicted_gamma_abs.to_f64()),
                ratio_sq,
                e_gap,
                e_lambda,
                phi_check,
                gap_zero: !odd,
            }
        })
        .collect();
    let gap_trend_violations = gap_trend(&rows);
    let lambda_trend_violations = lambda_trend(&rows);
    DeviationReport {
        rows,
        gap_trend_violations,
        lambda_trend_violations,
    }
}

fn gap_trend(rows: &[DeviationRow]) -> Vec<i64> {
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        let same: Vec<&DeviationRow> = rows.iter().filter(|r| r.n.signum() == sign).collect();
        let base = same
            .iter()
            .filter(|r| matches!(r.m, Some(3) | Some(4)))
            .filter_map(|r| r.e_gap)
            .fold(f64::NAN, f64::max);
        if base.is_nan() {
            continue;
        }
        for r in same {
            if let (Some(m), Some(e)) = (r.m, r.e_gap) {
                if m >= 5 && e > GAP_TREND_FACTOR * base {
                    out.push(r.n);
                }
            }
        }
    }
    out
}

fn lambda_trend(rows: &[DeviationRow]) -> Vec<i64> {
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        let mut same: Vec<&DeviationRow> = rows
            .iter()
            .filter(|r| r.n.signum() == sign && r.e_lambda.is_some())
            .collect();
        same.sort_by_key(|r| r.n.abs());
        let Some(first) = same.first().and_then(|r| r.e_lambda) else {
            continue;
        };
        for r in &same[1..] {
            if r.e_lambda.is_some_and(|e| e > LAMBDA_TREND_FACTOR * first) {
                out.push(r.n);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn v(c: [i64; 4]) -> TrigPotential {
        TrigPotential::from_ints(P, c)
    }

    #[test]
    fn lambda_plug_ins() {
        let x = predict_lambda(5, &v([1, 2, 3, 4])).unwrap().to_c64().0;
        assert!((x - 5.96).abs() < 1e-15);
        let x = predict_lambda(-5, &v([1, 2, 3, 4])).unwrap().to_c64().0;
        assert!((x + 6.04).abs() < 1e-15);
        let x = predict_lambda(5, &v([1, 1, 1, 1])).unwrap().to_c64().0;
        assert!((x - 5.2).abs() < 1e-15);
        assert_eq!(
            predict_lambda(5, &v([1, 1, 1, 0])),
            Err(Error::ZeroCoefficient { name: "B" })
        );
    }

    #[test]
    fn gap_plug_ins() {
        let p = predict_gap(7, &v([1, 1, 1, 1])).unwrap();
        assert!((p.predicted_gamma_abs.to_f64() - 2.0 / 147456.0).abs() < 1e-20);
        assert_eq!(p.bracket_exponents, (3, 4));
        assert!(predict_gap(6, &v([1, 2, 3, 4])).unwrap().predicted_gamma_squared.is_zero());
        assert!(predict_gap(6, &v([1, 1, 1, 0])).is_ok());
        // independent arithmetic: sqrt(6^4 4^3) = 36 * 8
        let p = predict_gap(-7, &v([1, 2, 3, 4])).unwrap();
        assert!((p.predicted_gamma_abs.to_f64() - 576.0 / 147456.0).abs() < 1e-18);
        assert_eq!(p.bracket_exponents, (4, 3));
        let sq = p.predicted_gamma_squared.to_c64().0;
        assert!((sq - (576.0f64 / 147456.0).powi(2)).abs() < 1e-20);
    }

    #[test]
    fn equal_coefficient_case() {
        // 2|a| a^{2m} / (4^{2m} (m!)^2)
        for (a, m) in [(1.5f64, 2u32), (0.5, 4), (2.0, 5)] {
            let vv = TrigPotential::from_c64(P, [(a, 0.0); 4]);
            let n = 2 * m as i64 + 1;
            let expect = 2.0 * a * a.powi(2 * m as i32)
                / (16f64.powi(m as i32) * (1..=m).map(f64::from).product::<f64>().powi(2));
            for sign in [1, -1] {
                let got = predict_gap(sign * n, &vv).unwrap().predicted_gamma_abs.to_f64();
                assert!((got / expect - 1.0).abs() < 1e-14, "{got} {expect}");
            }
        }
    }

    #[test]
    fn swap_symmetry_of_prediction() {
        let a = TrigPotential::from_c64(P, [(0.0, 1.0), (2.0, 0.0), (-3.0, 0.0), (0.0, 4.0)]);
        for n in [5, 9, 13] {
            let p = predict_gap(n, &a).unwrap().predicted_gamma_squared;
            let q = predict_gap(-n, &a.swapped()).unwrap().predicted_gamma_squared;
            assert!((&p - &q).abs_f64() <= 1e-30 * p.abs_f64());
        }
    }

    #[test]
    fn report_marks_even_rows() {
        let cfg = PrecisionConfig::new(P, 1e-30).unwrap();
        let pot = v([1, 1, 1, 1]);
        let even = SpectralPair::double(6, Scalar::from_f64(P, 6.17, 0.0), Method::Series, 0.0, 0);
        let r = deviation_report(&[even], &pot, &cfg);
        assert!(r.rows[0].gap_zero);
        assert!(r.rows[0].ratio_sq.is_none());
        assert!(r.rows[0].e_gap.is_none());
    }

    #[test]
    fn report_uses_squared_gaps() {
        let cfg = PrecisionConfig::new(P, 1e-30).unwrap();
        let pot = v([1, 1, 1, 1]);
        let pred = predict_gap(7, &pot).unwrap().predicted_gamma_abs;
        let g = Scalar::from_real(pred);
        let base = Scalar::from_int(P, 7);
        let up = SpectralPair::new(7, base.clone(), &base + &g, Method::Series, 0.0, 0);
        let r = deviation_report(&[up], &pot, &cfg);
        let ratio = r.rows[0].ratio_sq.as_ref().unwrap().to_c64();
        assert!((ratio.0 - 1.0).abs() < 1e-25 && ratio.1.abs() < 1e-25);
        assert!(r.rows[0].e_gap.unwrap() < 1e-20);
    }
}
