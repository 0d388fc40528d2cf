//! The `gaps`, `walks` and `verify` subcommands.

use std::io::Write;

use dirac_gaps::asymptotics::{predict_gap, predict_lambda};
use dirac_gaps::oracle::spectral_pair_matrix;
use dirac_gaps::solver::spectral_pair_series;
use dirac_gaps::walks::{enumerate, WalkKind};
use dirac_gaps::{Method, PrecisionConfig, Scalar, SpectralPair, TrigPotential};
use rug::Float;

use crate::checks::{self, VerifyOptions};
use crate::config::{MethodChoice, RunConfig};
use crate::literal::PotentialLiteral;
use crate::table::{self, sci, sci_f64, Row};
use crate::{is_argument_error, CliError};

fn methods(choice: MethodChoice) -> &'static [Method] {
    match choice {
        MethodChoice::Series => &[Method::Series],
        MethodChoice::Matrix => &[Method::Matrix],
        MethodChoice::Both => &[Method::Series, Method::Matrix],
        MethodChoice::Asym => &[Method::Asymptotic],
    }
}

fn blank_row(n: i64, method: Method, bits: u32) -> Row {
    Row {
        n,
        method: method.to_string(),
        precision_bits: bits,
        ..Default::default()
    }
}

fn fill_pair(row: &mut Row, pair: &SpectralPair, v: &TrigPotential, digits: usize) {
    row.lambda_minus_re = sci(pair.lambda_minus.re(), digits);
    row.lambda_minus_im = sci(pair.lambda_minus.im(), digits);
    row.lambda_plus_re = sci(pair.lambda_plus.re(), digits);
    row.lambda_plus_im = sci(pair.lambda_plus.im(), digits);
    row.gamma_re = sci(pair.gamma.re(), digits);
    row.gamma_im = sci(pair.gamma.im(), digits);
    row.gamma_abs = sci(&pair.gamma.abs(), digits);
    // predictions need a fully nonzero potential for odd n
    if let Ok(pred) = predict_gap(pair.n, v) {
        row.pred_gamma_abs = sci(&pred.predicted_gamma_abs, digits);
        if !pred.predicted_gamma_squared.is_zero() {
            let ratio = &pair.gamma_squared() / &pred.predicted_gamma_squared;
            row.ratio_sq = sci(ratio.re(), digits);
        }
    }
    row.err_est = sci_f64(pair.error_estimate, digits);
    row.iterations = Some(pair.iterations);
    row.status = "ok".into();
}

fn asym_row(n: i64, v: &TrigPotential, bits: u32, digits: usize) -> Result<Row, CliError> {
    let arg = |e: dirac_gaps::Error| CliError::Argument(e.to_string());
    let lambda = predict_lambda(n, v).map_err(arg)?;
    let pred = predict_gap(n, v).map_err(arg)?;
    let gamma = pred.predicted_gamma_squared.sqrt();
    let half = gamma.scale(&Float::with_val(bits, 0.5));
    let minus = &lambda - &half;
    let plus = &lambda + &half;
    let mut row = blank_row(n, Method::Asymptotic, bits);
    row.lambda_minus_re = sci(minus.re(), digits);
    row.lambda_minus_im = sci(minus.im(), digits);
    row.lambda_plus_re = sci(plus.re(), digits);
    row.lambda_plus_im = sci(plus.im(), digits);
    row.gamma_re = sci(gamma.re(), digits);
    row.gamma_im = sci(gamma.im(), digits);
    row.gamma_abs = sci(&gamma.abs(), digits);
    row.pred_gamma_abs = sci(&pred.predicted_gamma_abs, digits);
    row.status = "ok".into();
    Ok(row)
}

/// Computes the table rows in `n` order. Argument errors abort; numerical
/// failures become rows with a non-`ok` status.
pub fn gap_rows(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let prec: PrecisionConfig = cfg.precision()?;
    let bits = prec.precision_bits();
    let v = cfg.potential.to_potential(bits)?;
    let k_extra = cfg.extra_modes;
    let mut rows = Vec::new();
    for n in cfg.n_range.iter() {
        for &method in methods(cfg.method) {
            let computed = match method {
                Method::Asymptotic => {
                    rows.push(asym_row(n, &v, bits, cfg.digits)?);
                    continue;
                }
                Method::Series => spectral_pair_series(n, &v, &prec),
                Method::Matrix => {
                    spectral_pair_matrix(n, &v, &prec, Some(n.unsigned_abs() as u32 + k_extra))
                }
            };
            let mut row = blank_row(n, method, bits);
            match computed {
                Ok(pair) => fill_pair(&mut row, &pair, &v, cfg.digits),
                Err(e) if is_argument_error(&e) => return Err(CliError::Argument(e.to_string())),
                Err(e) => row.status = format!("error: {e}"),
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Writes the table to the configured output (stdout when none).
pub fn cmd_gaps(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = gap_rows(cfg)?;
    let text = table::render(&rows, cfg.format)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        return Err(CliError::NonConvergence { failed });
    }
    Ok(())
}

fn join<T: ToString>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn complex(z: &Scalar, digits: usize) -> String {
    format!("{} {}i", sci(z.re(), digits), sci(z.im(), digits))
}

/// Lists the walks of `kind` from `n` with `index` backtracks (`r` for X/Y,
/// `nu` for W).
pub fn cmd_walks(
    out: &mut impl Write,
    kind: WalkKind,
    n: i64,
    index: usize,
    potential: &PotentialLiteral,
    bits: u32,
    digits: usize,
) -> Result<(), CliError> {
    let v = potential.to_potential(bits)?;
    let walks = enumerate(kind, n, index).map_err(|e| CliError::Argument(e.to_string()))?;
    let z = Scalar::zero(bits);
    let label = if kind == WalkKind::W { "nu" } else { "r" };
    writeln!(out, "kind {kind}  n = {n}  {label} = {index}  potential {potential}")?;
    let mut sum = Scalar::zero(bits);
    for w in &walks {
        let weight = w.weight(&z, &v).map_err(|e| CliError::Argument(e.to_string()))?;
        writeln!(
            out,
            "steps {}  interior vertices {}  weight {}",
            join(w.steps()),
            join(&w.vertices()),
            complex(&weight, digits)
        )?;
        sum = &sum + &weight;
    }
    let noun = if walks.len() == 1 { "walk" } else { "walks" };
    writeln!(out, "{} {noun}  sum {}", walks.len(), complex(&sum, digits))?;
    Ok(())
}

/// Runs the acceptance checks and prints one line per check.
pub fn cmd_verify(out: &mut impl Write, opts: &VerifyOptions) -> Result<(), CliError> {
    let mut failed = 0;
    let ids = if opts.quick { checks::QUICK.to_vec() } else { checks::ALL.to_vec() };
    for id in ids {
        let outcome = checks::run_check(id, opts);
        writeln!(out, "{}", outcome.line())?;
        out.flush()?;
        if !outcome.passed {
            failed += 1;
        }
    }
    writeln!(out, "{}", if failed == 0 { "all checks passed".to_string() } else { format!("{failed} check(s) failed") })?;
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed });
    }
    Ok(())
}
