//! Walk sums by dynamic programming.
//!
//! `sigma_r^±(n, z)` and `tau_nu(n, z)` are sums of walk weights over
//! exponentially many walks, but every weight factors step by step, so one
//! forward sweep over (step count, vertex) produces all of them at once:
//! after `t` steps, slot `j` holds the sum of partial weights of admissible
//! prefixes ending at vertex `j`, interior denominators included. A prefix of
//! the right length that lands on the endpoint contributes one term.
//!
//! The sweep keeps a single array: vertices reachable after `t` steps share
//! the parity of `t` (in units of 2 from the start), so step `t` reads the
//! `t - 1` slots and overwrites the other half.

use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::potential::{Field, TrigPotential};
use crate::scalar::{closed_form_denominator, PrecisionConfig, Scalar};
use crate::walks::check_disc;

/// Hard cap on the number of series terms summed by [`beta`] and [`alpha`].
pub const MAX_SERIES_TERMS: usize = 400;

/// Which off-diagonal series: `Plus` is beta^+ (walks -n -> n), `Minus` is
/// beta^- (walks n -> -n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A truncated series: partial sum plus what is known about the remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: Scalar,
    /// Bound on the dropped remainder. Rigorous unless `heuristic` is set.
    pub tail_bound: Float,
    /// Geometric extrapolation of the last few terms; always filled.
    pub tail_estimate: Float,
    pub terms_used: usize,
    pub heuristic: bool,
}

impl SeriesValue {
    fn exact_zero(prec: u32) -> Self {
        Self {
            value: Scalar::zero(prec),
            tail_bound: Float::new(prec),
            tail_estimate: Float::new(prec),
            terms_used: 0,
            heuristic: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Chain {
    /// -n to n, numerator q p q ..., denominators (n-j+z) at odd arrivals.
    Forward,
    /// n to -n, numerator p q p ..., denominators (n+j+z) at odd arrivals.
    Backward,
    /// n to n, numerator p q ... q, denominators as `Backward`.
    Loop,
}

impl Chain {
    fn of(sign: Sign) -> Self {
        match sign {
            Sign::Plus => Chain::Forward,
            Sign::Minus => Chain::Backward,
        }
    }
}

struct WalkSums<'a> {
    chain: Chain,
    n: i64,
    z: Scalar,
    v: &'a TrigPotential,
    start: i64,
    end: i64,
    center: usize,
    vals: Vec<Scalar>,
    inv: Vec<Option<Scalar>>,
    t: usize,
    tmp: Scalar,
    scratch: Float,
    zero: Scalar,
}

impl<'a> WalkSums<'a> {
    fn new(chain: Chain, n: i64, z: &Scalar, v: &'a TrigPotential, max_len: usize) -> Self {
        let prec = z.prec().max(v.prec());
        let (start, end) = match chain {
            Chain::Forward => (-n, n),
            Chain::Backward => (n, -n),
            Chain::Loop => (n, n),
        };
        let center = max_len + 1;
        let size = 2 * max_len + 3;
        let mut vals = vec![Scalar::zero(prec); size];
        vals[center] = Scalar::one(prec);
        Self {
            chain,
            n,
            z: z.with_prec(prec),
            v,
            start,
            end,
            center,
            vals,
            inv: vec![None; size],
            t: 0,
            tmp: Scalar::zero(prec),
            scratch: Float::new(prec),
            zero: Scalar::zero(prec),
        }
    }

    fn vertex(&self, i: usize) -> i64 {
        self.start + 2 * (i as i64 - self.center as i64)
    }

    /// `Some(n - j)` or `Some(n + j)` for an arrival at step `t` on vertex
    /// `j`; the factor whose vanishing marks `j` as forbidden.
    fn base(&self, j: i64, t: usize) -> i64 {
        let odd = t % 2 == 1;
        let minus = match self.chain {
            Chain::Forward => odd,
            Chain::Backward | Chain::Loop => !odd,
        };
        if minus {
            self.n - j
        } else {
            self.n + j
        }
    }

    fn field(&self, t: usize) -> Field {
        let odd = t % 2 == 1;
        match (self.chain, odd) {
            (Chain::Forward, true) => Field::Q,
            (Chain::Forward, false) => Field::P,
            (_, true) => Field::P,
            (_, false) => Field::Q,
        }
    }

    fn fill_inverse(&mut self, i: usize, t: usize) -> Result<()> {
        let j = self.vertex(i);
        let base = self.base(j, t);
        if base == 0 {
            self.inv[i] = None;
            return Ok(());
        }
        let den = &Scalar::from_int(self.z.prec(), base) + &self.z;
        if den.is_zero() {
            return Err(Error::SingularDenominator { vertex: j, step: t });
        }
        self.inv[i] = Some(den.recip());
        Ok(())
    }

    /// Advances one step. Returns the sum over complete walks of the new
    /// length (the unpruned, undivided value at the endpoint).
    fn step(&mut self) -> Result<Scalar> {
        self.t += 1;
        let t = self.t;
        let lo = self.center - t;
        let hi = self.center + t;
        if hi + 1 >= self.vals.len() {
            return Err(Error::InvalidArgument("walk sum capacity exceeded".into()));
        }
        self.fill_inverse(lo, t)?;
        self.fill_inverse(hi, t)?;
        let field = self.field(t);
        let up = self.v.step_coefficient(field, 2).unwrap_or(&self.zero).clone();
        let down = self.v.step_coefficient(field, -2).unwrap_or(&self.zero).clone();
        let end_offset = (self.end - self.start) / 2;
        let end_index = self.center as i64 + end_offset;
        let mut arrived = Scalar::zero(self.z.prec());
        for i in (lo..=hi).step_by(2) {
            // An up-step reaches i from i - 1, a down-step from i + 1.
            self.tmp.assign_mul(&self.vals[i - 1], &up, &mut self.scratch);
            self.tmp.add_mul(&self.vals[i + 1], &down, &mut self.scratch);
            if i as i64 == end_index {
                arrived = self.tmp.clone();
            }
            match &self.inv[i] {
                Some(inv) => self.vals[i].assign_mul(&self.tmp, inv, &mut self.scratch),
                None => self.vals[i].set_zero(),
            }
        }
        Ok(arrived)
    }
}

fn validate_crossing(n: i64) -> Result<()> {
    if n.abs() < 3 {
        return Err(Error::InvalidArgument(format!(
            "crossing walk sums need |n| >= 3, got n = {n}"
        )));
    }
    Ok(())
}

/// `sigma_r^±(n, z)` for `r = 0..=r_max`.
pub fn sigma_terms(
    sign: Sign,
    n: i64,
    r_max: usize,
    z: &Scalar,
    v: &TrigPotential,
) -> Result<Vec<Scalar>> {
    check_disc(z)?;
    let prec = z.prec().max(v.prec());
    if n % 2 == 0 {
        return Ok(vec![Scalar::zero(prec); r_max + 1]);
    }
    validate_crossing(n)?;
    let len0 = n.unsigned_abs() as usize;
    let mut sums = WalkSums::new(Chain::of(sign), n, z, v, len0 + 2 * r_max);
    let mut out = Vec::with_capacity(r_max + 1);
    for t in 1..=len0 + 2 * r_max {
        let arrived = sums.step()?;
        if t >= len0 && (t - len0) % 2 == 0 {
            out.push(arrived);
        }
    }
    Ok(out)
}

/// `sigma_r^±(n, z)`, the sum of walk weights over `X_n(r)` (`Plus`) or
/// `Y_n(r)` (`Minus`). Zero for even `n`.
pub fn sigma(sign: Sign, n: i64, r: usize, z: &Scalar, v: &TrigPotential) -> Result<Scalar> {
    Ok(sigma_terms(sign, n, r, z, v)?.pop().expect("r_max + 1 terms"))
}

/// `tau_nu(n, z)` for `nu = 1..=nu_max` (index 0 holds `tau_1`).
pub fn tau_terms(n: i64, nu_max: usize, z: &Scalar, v: &TrigPotential) -> Result<Vec<Scalar>> {
    check_disc(z)?;
    if n.abs() < 2 {
        return Err(Error::InvalidArgument(format!("loop sums need |n| >= 2, got {n}")));
    }
    if nu_max == 0 {
        return Ok(Vec::new());
    }
    let mut sums = WalkSums::new(Chain::Loop, n, z, v, 2 * nu_max);
    let mut out = Vec::with_capacity(nu_max);
    for t in 1..=2 * nu_max {
        let arrived = sums.step()?;
        if t % 2 == 0 {
            out.push(arrived);
        }
    }
    Ok(out)
}

/// `tau_nu(n, z)`, the sum over loop walks `W_n(nu)` of `2 nu` steps.
pub fn tau(n: i64, nu: usize, z: &Scalar, v: &TrigPotential) -> Result<Scalar> {
    if nu == 0 {
        return Err(Error::InvalidArgument("nu starts at 1".into()));
    }
    Ok(tau_terms(n, nu, z, v)?.pop().expect("nu terms"))
}

/// Streams terms into a partial sum until the stopping rule fires.
///
/// Stops at the first term `k` with `|term_k| <= tol |partial|` for which
/// either the rigorous remainder bound is below `tol |partial|` or the two
/// preceding terms were also that small.
fn sum_until_converged(
    n: i64,
    prec: u32,
    cfg: &PrecisionConfig,
    mut next_term: impl FnMut() -> Result<Scalar>,
    rigorous_tail: impl Fn(usize) -> Option<Float>,
) -> Result<SeriesValue> {
    let tol = cfg.rel_tol_float();
    let mut partial = Scalar::zero(prec);
    let mut small_run = 0usize;
    let mut ratios: Vec<f64> = Vec::new();
    let mut prev_abs: Option<Float> = None;
    let mut last_abs = Float::new(prec);
    let mut terms = 0usize;
    let mut stopped = false;
    while terms < MAX_SERIES_TERMS {
        let term = next_term()?;
        terms += 1;
        partial += &term;
        let term_abs = term.abs();
        if let Some(prev) = &prev_abs {
            if !prev.is_zero() {
                ratios.push(Float::with_val(prec, &term_abs / prev).to_f64());
            }
        }
        let threshold = Float::with_val(prec, &tol * &partial.abs());
        if term_abs <= threshold {
            small_run += 1;
            let rigorous_ok = rigorous_tail(terms - 1).is_some_and(|t| t < threshold);
            if rigorous_ok || small_run >= 3 {
                stopped = true;
            }
        } else {
            small_run = 0;
        }
        prev_abs = Some(term_abs.clone());
        last_abs = term_abs;
        if stopped {
            break;
        }
    }
    let recent = &ratios[ratios.len().saturating_sub(3)..];
    let q = recent.iter().copied().fold(0.0f64, f64::max);
    let tail_estimate = if last_abs.is_zero() {
        Float::new(prec)
    } else if q < 1.0 {
        Float::with_val(prec, &last_abs * (q / (1.0 - q)))
    } else {
        last_abs.clone()
    };
    let rigorous = rigorous_tail(terms - 1);
    if !stopped && rigorous.is_none() && !(q < 1.0) {
        return Err(Error::NonConvergent {
            n,
            terms,
            last_ratio: q,
        });
    }
    let heuristic = rigorous.is_none();
    Ok(SeriesValue {
        value: partial,
        tail_bound: rigorous.unwrap_or_else(|| tail_estimate.clone()),
        tail_estimate,
        terms_used: terms,
        heuristic,
    })
}

/// Geometric tail `scale * rho^(first) / (1 - rho)` when `rho < 1`.
fn geometric_tail(prec: u32, scale: &Float, rho: &Float, first: u32) -> Option<Float> {
    if *rho >= 1 {
        return None;
    }
    let p = Float::with_val(prec, rho.pow(first));
    let one_minus = Float::with_val(prec, 1 - rho);
    Some(Float::with_val(prec, scale * &p) / one_minus)
}

/// `beta_n^±(z) = sum_r sigma_r^±(n, z)`.
///
/// The rigorous remainder after `sigma_r` is `D rho^(m+r+1) / (1 - rho)` with
/// `rho = 8 D^2 / m`; when `rho >= 1` only the empirical estimate is
/// available and the result is flagged heuristic.
pub fn beta(
    sign: Sign,
    n: i64,
    z: &Scalar,
    v: &TrigPotential,
    cfg: &PrecisionConfig,
) -> Result<SeriesValue> {
    check_disc(z)?;
    let prec = cfg.precision_bits();
    if n % 2 == 0 {
        return Ok(SeriesValue::exact_zero(prec));
    }
    validate_crossing(n)?;
    let z = z.with_prec(prec);
    let v = v.with_prec(prec);
    let m = (n.unsigned_abs() - 1) / 2;
    let d = Float::with_val(prec, v.max_abs());
    let rho = Float::with_val(prec, d.square_ref()) * 8u32 / m as u32;
    let len0 = n.unsigned_abs() as usize;
    let mut sums = WalkSums::new(Chain::of(sign), n, &z, &v, len0 + 2 * MAX_SERIES_TERMS);
    let mut first = true;
    let next = || -> Result<Scalar> {
        let steps = if first { len0 } else { 2 };
        first = false;
        let mut arrived = None;
        for _ in 0..steps {
            arrived = Some(sums.step()?);
        }
        Ok(arrived.expect("at least one step"))
    };
    let rigorous = |r: usize| geometric_tail(prec, &d, &rho, m as u32 + r as u32 + 1);
    sum_until_converged(n, prec, cfg, next, rigorous)
}

/// `alpha_n(z) = sum_nu tau_nu(n, z)`.
///
/// The rigorous remainder after `tau_nu` uses `|tau_k| <= (C/|n|)^k` with
/// `C = 8 D^2`.
pub fn alpha(n: i64, z: &Scalar, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<SeriesValue> {
    check_disc(z)?;
    if n.abs() < 2 {
        return Err(Error::InvalidArgument(format!("loop sums need |n| >= 2, got {n}")));
    }
    let prec = cfg.precision_bits();
    let z = z.with_prec(prec);
    let v = v.with_prec(prec);
    let d = Float::with_val(prec, v.max_abs());
    let ratio = Float::with_val(prec, d.square_ref()) * 8u32 / n.unsigned_abs() as u32;
    let one = Float::with_val(prec, 1);
    let mut sums = WalkSums::new(Chain::Loop, n, &z, &v, 2 * MAX_SERIES_TERMS);
    let next = || -> Result<Scalar> {
        sums.step()?;
        sums.step()
    };
    // after tau_{k+1} (k = 0-based index) the remainder starts at tau_{k+2}
    let rigorous = |k: usize| geometric_tail(prec, &one, &ratio, k as u32 + 2);
    sum_until_converged(n, prec, cfg, next, rigorous)
}

/// Closed form of `sigma_0^±(n, 0)` for odd `n = ±(2m+1)`, zero for even `n`.
pub fn sigma0_closed_form(sign: Sign, n: i64, v: &TrigPotential) -> Result<Scalar> {
    let prec = v.prec();
    if n % 2 == 0 {
        return Ok(Scalar::zero(prec));
    }
    validate_crossing(n)?;
    let m = ((n.unsigned_abs() - 1) / 2) as u32;
    let (low, high, low_exp, high_exp) = match (sign, n > 0) {
        (Sign::Plus, true) => (v.A(), v.B(), m, m + 1),
        (Sign::Plus, false) => (v.a(), v.b(), m, m + 1),
        (Sign::Minus, true) => (v.a(), v.b(), m + 1, m),
        (Sign::Minus, false) => (v.A(), v.B(), m + 1, m),
    };
    let num = &low.powi(low_exp) * &high.powi(high_exp);
    let mut den = Float::new(prec);
    den.assign(&closed_form_denominator(prec, m));
    Ok(num.scale(&den.recip()))
}

/// `Phi(n, z)` with `sigma_1^+(n, z) = sigma_0^+(n, z) Phi(n, z)`, together
/// with `Phi*(n, z)`, the sum of the absolute values of its terms.
///
/// For `n < 0` the roles of `bA` and `aB` are exchanged relative to `n > 0`:
/// the inserted backward step then lands on the other parity.
pub fn phi(n: i64, z: &Scalar, v: &TrigPotential) -> Result<(Scalar, Float)> {
    check_disc(z)?;
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("Phi needs odd n, got {n}")));
    }
    validate_crossing(n)?;
    let prec = z.prec().max(v.prec());
    let m = ((n.unsigned_abs() - 1) / 2) as i64;
    let zs = if n > 0 { z.with_prec(prec) } else { -z.with_prec(prec) };
    let ba = v.b() * v.A();
    let ab = v.a() * v.B();
    let (first, second) = if n > 0 { (&ba, &ab) } else { (&ab, &ba) };
    let shifted = |c: i64| &Scalar::from_int(prec, c) + &zs;
    let mut total = Scalar::zero(prec);
    let mut total_abs = Float::new(prec);
    let mut push = |term: Scalar| -> Result<()> {
        if !term.is_finite() {
            return Err(Error::SingularDenominator { vertex: n, step: 0 });
        }
        total_abs += term.abs();
        total += &term;
        Ok(())
    };
    for k in 1..=m {
        let den = &shifted(4 * (m + 1 - k)) * &shifted(4 * k);
        push(first / &den)?;
    }
    for k in 2..=m {
        let den = &shifted(4 * (k - 1)) * &shifted(4 * (m + 1 - k));
        push(second / &den)?;
    }
    Ok((total, total_abs))
}

/// The factor relating `sigma_1^±` to `sigma_0^±`: [`phi`] for `Plus`, and
/// for `Minus` the same formula applied to `(Q, P; -n, -z)`.
pub fn phi_signed(sign: Sign, n: i64, z: &Scalar, v: &TrigPotential) -> Result<(Scalar, Float)> {
    match sign {
        Sign::Plus => phi(n, z, v),
        Sign::Minus => phi(-n, &-z, &v.swapped()),
    }
}
