//! Roots of the reduced characteristic equation
//! `(z - alpha_n(z))^2 = beta_n^-(z) beta_n^+(z)` near `z = 0`.
//!
//! For odd `n` the equation splits into the branch equations
//! `z = alpha_n(z) + S(z)` (E1) and `z = alpha_n(z) - S(z)` (E2), where `S`
//! is an analytic square root of `beta^- beta^+`. `S` is anchored at the
//! closed-form leading product and continued along the iteration path, so the
//! two branches never swap roots. Each branch is solved by fixed-point
//! iteration; a secant iteration on the same branch equation takes over when
//! the map fails to contract.

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::error::{Error, Result};
use crate::potential::TrigPotential;
use crate::scalar::{PrecisionConfig, Scalar};
use crate::series::{alpha, beta, sigma0_closed_form, SeriesValue, Sign};

/// Iteration cap for both the fixed-point and the secant stage.
pub const MAX_ITERATIONS: usize = 100;

/// Successive step ratios above this flag a contraction violation.
pub const CONTRACTION_WARNING_RATIO: f64 = 0.9;

/// Largest starting deviation handed to the series, inside the disc |z| <= 1/2.
const MAX_START: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    Matrix,
    Asymptotic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Series => "series",
            Method::Matrix => "matrix",
            Method::Asymptotic => "asym",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "series" => Ok(Method::Series),
            "matrix" => Ok(Method::Matrix),
            "asym" | "asymptotic" => Ok(Method::Asymptotic),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// The two eigenvalues in the disc `|lambda - n| < 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub n: i64,
    pub lambda_minus: Scalar,
    pub lambda_plus: Scalar,
    /// `lambda_plus - lambda_minus`.
    pub gamma: Scalar,
    pub method: Method,
    pub error_estimate: f64,
    pub iterations: usize,
    /// Largest `|(z - alpha)^2 - beta^- beta^+|` over the returned roots
    /// (series method only).
    pub residual: Option<f64>,
}

impl SpectralPair {
    /// Orders the two eigenvalues by real part, then imaginary part, and
    /// fills in `gamma`.
    pub fn new(
        n: i64,
        first: Scalar,
        second: Scalar,
        method: Method,
        error_estimate: f64,
        iterations: usize,
    ) -> Self {
        let (lambda_minus, lambda_plus) = if first.lex_cmp(&second).is_le() {
            (first, second)
        } else {
            (second, first)
        };
        let gamma = &lambda_plus - &lambda_minus;
        Self {
            n,
            lambda_minus,
            lambda_plus,
            gamma,
            method,
            error_estimate,
            iterations,
            residual: None,
        }
    }

    /// A double eigenvalue: both entries equal and `gamma` exactly zero.
    pub fn double(n: i64, lambda: Scalar, method: Method, error_estimate: f64, iterations: usize) -> Self {
        let gamma = Scalar::zero(lambda.prec());
        Self {
            n,
            lambda_minus: lambda.clone(),
            lambda_plus: lambda,
            gamma,
            method,
            error_estimate,
            iterations,
            residual: None,
        }
    }

    pub fn z_minus(&self) -> Scalar {
        &self.lambda_minus - &Scalar::from_int(self.lambda_minus.prec(), self.n)
    }

    pub fn z_plus(&self) -> Scalar {
        &self.lambda_plus - &Scalar::from_int(self.lambda_plus.prec(), self.n)
    }

    pub fn gamma_squared(&self) -> Scalar {
        &self.gamma * &self.gamma
    }
}

/// Which branch equation: `E1` is `z = alpha + S`, `E2` is `z = alpha - S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    E1,
    E2,
}

impl Branch {
    fn sign(self) -> i64 {
        match self {
            Branch::E1 => 1,
            Branch::E2 => -1,
        }
    }
}

/// How the root was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    FixedPoint,
    Secant,
}

/// A converged root of one branch equation.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRoot {
    pub z: Scalar,
    pub iterations: usize,
    pub error_estimate: f64,
    pub residual: f64,
    pub stage: Stage,
    /// Set when successive fixed-point steps shrank by less than
    /// [`CONTRACTION_WARNING_RATIO`].
    pub contraction_warning: bool,
    /// Set when the closed-form anchor of the square root was unusable and
    /// the product was anchored at the starting point instead.
    pub reanchored: bool,
}

/// Series values of `alpha`, `beta^-`, `beta^+` at one point.
struct Reduced {
    alpha: SeriesValue,
    minus: SeriesValue,
    plus: SeriesValue,
}

impl Reduced {
    fn eval(n: i64, z: &Scalar, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<Self> {
        Ok(Self {
            alpha: alpha(n, z, v, cfg)?,
            minus: beta(Sign::Minus, n, z, v, cfg)?,
            plus: beta(Sign::Plus, n, z, v, cfg)?,
        })
    }

    fn product(&self) -> Scalar {
        &self.minus.value * &self.plus.value
    }

    /// Propagated truncation error of `alpha ± S` given `|S|`.
    fn truncation(&self, s_abs: f64) -> f64 {
        let rel = |x: &SeriesValue| {
            let a = x.value.abs_f64();
            if a == 0.0 {
                0.0
            } else {
                x.tail_estimate.to_f64() / a
            }
        };
        self.alpha.tail_estimate.to_f64() + 0.5 * s_abs * (rel(&self.minus) + rel(&self.plus))
    }

    /// `|(z - alpha)^2 - beta^- beta^+|`.
    fn residual(&self, z: &Scalar) -> f64 {
        let d = z - &self.alpha.value;
        (&(&d * &d) - &self.product()).abs_f64()
    }
}

/// Square root of `beta^- beta^+` continued from an anchor point.
#[derive(Debug, Clone)]
struct SqrtTrack {
    product: Scalar,
    root: Scalar,
}

impl SqrtTrack {
    /// Value at a point with product `p`, continued from the anchor; errors
    /// when `p` strays too far for the principal root of `p / anchor` to be
    /// the analytic continuation.
    fn continue_to(&self, n: i64, p: &Scalar) -> Result<Scalar> {
        if self.product.is_zero() {
            return Ok(Scalar::zero(p.prec()));
        }
        let w = p / &self.product;
        check_ratio(n, &w)?;
        Ok(&self.root * &w.sqrt())
    }

    fn advance(&mut self, product: Scalar, root: Scalar) {
        if !product.is_zero() {
            self.product = product;
            self.root = root;
        }
    }
}

fn check_ratio(n: i64, w: &Scalar) -> Result<()> {
    let r = (w - &Scalar::one(w.prec())).abs_f64();
    if r >= 0.5 {
        return Err(Error::BranchInstability { n, ratio: r });
    }
    Ok(())
}

fn require_odd(n: i64) -> Result<()> {
    if n % 2 == 0 || n.abs() < 3 {
        return Err(Error::InvalidArgument(format!(
            "branch equations need odd |n| >= 3, got {n}"
        )));
    }
    Ok(())
}

/// Closed-form anchored square root: `sqrt(sigma_0^- sigma_0^+)` at `z = 0`
/// times `(1 + r^-)^{1/2} (1 + r^+)^{1/2}` with `r^± = beta^± / sigma_0^± - 1`.
fn closed_form_sqrt(n: i64, v: &TrigPotential, minus: &Scalar, plus: &Scalar) -> Result<Scalar> {
    let prec = minus.prec().max(plus.prec());
    let v = v.with_prec(prec);
    let s_minus = sigma0_closed_form(Sign::Minus, n, &v)?;
    let s_plus = sigma0_closed_form(Sign::Plus, n, &v)?;
    if s_minus.is_zero() || s_plus.is_zero() {
        let p = minus * plus;
        if p.is_zero() {
            return Ok(p);
        }
        return Err(Error::BranchInstability {
            n,
            ratio: f64::INFINITY,
        });
    }
    let w_minus = minus / &s_minus;
    let w_plus = plus / &s_plus;
    check_ratio(n, &w_minus)?;
    check_ratio(n, &w_plus)?;
    let lead = (&s_minus * &s_plus).sqrt();
    Ok(&(&lead * &w_minus.sqrt()) * &w_plus.sqrt())
}

/// Analytic square root of `beta_n^-(z) beta_n^+(z)` built on the closed-form
/// leading product. Zero for even `n`.
pub fn sqrt_beta_product(n: i64, z: &Scalar, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<Scalar> {
    if n % 2 == 0 {
        return Ok(Scalar::zero(cfg.precision_bits()));
    }
    let minus = beta(Sign::Minus, n, z, v, cfg)?;
    let plus = beta(Sign::Plus, n, z, v, cfg)?;
    closed_form_sqrt(n, v, &minus.value, &plus.value)
}

/// Starting point `(Ab + aB) / 2n`, pulled inside the disc if needed.
pub fn starting_point(n: i64, v: &TrigPotential, prec: u32) -> Scalar {
    let v = v.with_prec(prec);
    let sum = &v.ab_upper_lower() + &v.ab_lower_upper();
    let mut z0 = &sum / &Scalar::from_int(prec, 2 * n);
    let r = z0.abs_f64();
    if r > MAX_START {
        z0 = z0.scale(&Float::with_val(prec, MAX_START / r));
    }
    z0
}

/// Anchor for the square root shared by both branches of one `n`.
fn anchor(n: i64, z0: &Scalar, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<(SqrtTrack, bool)> {
    let red = Reduced::eval(n, z0, v, cfg)?;
    let product = red.product();
    match closed_form_sqrt(n, v, &red.minus.value, &red.plus.value) {
        Ok(root) => Ok((SqrtTrack { product, root }, false)),
        Err(Error::BranchInstability { .. }) => {
            let root = product.sqrt();
            Ok((SqrtTrack { product, root }, true))
        }
        Err(e) => Err(e),
    }
}

fn step_tolerance(n: i64, z: &Scalar, cfg: &PrecisionConfig) -> f64 {
    cfg.rel_tol() * z.abs_f64().max(1.0 / n.abs() as f64)
}

/// Right-hand side `alpha(z) ± S(z)` of a branch equation, with the new
/// square-root value.
fn branch_map(
    n: i64,
    branch: Branch,
    z: &Scalar,
    v: &TrigPotential,
    cfg: &PrecisionConfig,
    track: &SqrtTrack,
) -> Result<(Scalar, Reduced, Scalar, Scalar)> {
    let red = Reduced::eval(n, z, v, cfg)?;
    let product = red.product();
    let s = track.continue_to(n, &product)?;
    let image = &red.alpha.value + &s.scale_int(branch.sign());
    Ok((image, red, product, s))
}

fn fixed_point(
    n: i64,
    branch: Branch,
    z0: &Scalar,
    v: &TrigPotential,
    cfg: &PrecisionConfig,
    mut track: SqrtTrack,
) -> Result<BranchRoot> {
    let mut z = z0.clone();
    let mut prev_step: Option<f64> = None;
    let mut warning = false;
    for it in 1..=MAX_ITERATIONS {
        let (image, red, product, s) = branch_map(n, branch, &z, v, cfg, &track)?;
        track.advance(product, s.clone());
        let step = (&image - &z).abs_f64();
        if let Some(p) = prev_step {
            if p > 0.0 && step / p > CONTRACTION_WARNING_RATIO {
                warning = true;
                if step >= p {
                    return Err(Error::SolverNonConvergent {
                        n,
                        iterations: it,
                        last_step: step,
                    });
                }
            }
        }
        z = image;
        if step <= step_tolerance(n, &z, cfg) {
            return finish(n, z, it, step, &red, &s, cfg, v, Stage::FixedPoint, warning);
        }
        prev_step = Some(step);
    }
    Err(Error::SolverNonConvergent {
        n,
        iterations: MAX_ITERATIONS,
        last_step: prev_step.unwrap_or(f64::NAN),
    })
}

fn secant(
    n: i64,
    branch: Branch,
    z0: &Scalar,
    v: &TrigPotential,
    cfg: &PrecisionConfig,
    mut track: SqrtTrack,
) -> Result<BranchRoot> {
    let prec = cfg.precision_bits();
    let g = |z: &Scalar, track: &SqrtTrack| -> Result<(Scalar, Reduced, Scalar, Scalar)> {
        let (image, red, product, s) = branch_map(n, branch, z, v, cfg, track)?;
        Ok((z - &image, red, product, s))
    };
    let mut x0 = z0.clone();
    let (mut g0, _, p0, s0) = g(&x0, &track)?;
    track.advance(p0, s0);
    // second seed: one fixed-point step
    let mut x1 = &x0 - &g0;
    let mut last = f64::NAN;
    for it in 1..=MAX_ITERATIONS {
        let (g1, red, p1, s1) = g(&x1, &track)?;
        track.advance(p1, s1.clone());
        let dg = &g1 - &g0;
        if dg.is_zero() {
            return finish(n, x1, it, 0.0, &red, &s1, cfg, v, Stage::Secant, false);
        }
        let dx = &(&x1 - &x0) * &(&g1 / &dg);
        let x2 = &x1 - &dx;
        last = dx.abs_f64();
        if x2.abs_f64() > 0.5 || !x2.is_finite() {
            break;
        }
        x0 = x1;
        g0 = g1;
        x1 = x2.with_prec(prec);
        if last <= step_tolerance(n, &x1, cfg) {
            return finish(n, x1, it, last, &red, &s1, cfg, v, Stage::Secant, false);
        }
    }
    Err(Error::SolverNonConvergent {
        n,
        iterations: MAX_ITERATIONS,
        last_step: last,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n: i64,
    z: Scalar,
    iterations: usize,
    last_step: f64,
    red: &Reduced,
    s: &Scalar,
    cfg: &PrecisionConfig,
    v: &TrigPotential,
    stage: Stage,
    contraction_warning: bool,
) -> Result<BranchRoot> {
    let at_root = Reduced::eval(n, &z, v, cfg)?;
    let residual = at_root.residual(&z);
    let estimate = last_step + red.truncation(s.abs_f64());
    Ok(BranchRoot {
        z,
        iterations,
        error_estimate: estimate.max(residual),
        residual,
        stage,
        contraction_warning,
        reanchored: false,
    })
}

fn solve_with_track(
    n: i64,
    branch: Branch,
    z0: &Scalar,
    v: &TrigPotential,
    cfg: &PrecisionConfig,
    track: &SqrtTrack,
) -> Result<BranchRoot> {
    match fixed_point(n, branch, z0, v, cfg, track.clone()) {
        Ok(root) => Ok(root),
        Err(Error::SolverNonConvergent { .. })
        | Err(Error::BranchInstability { .. })
        | Err(Error::OutsideDisc { .. }) => match secant(n, branch, z0, v, cfg, track.clone()) {
            Err(Error::OutsideDisc { abs_z }) => Err(Error::SolverNonConvergent {
                n,
                iterations: MAX_ITERATIONS,
                last_step: abs_z,
            }),
            other => other,
        },
        Err(e) => Err(e),
    }
}

/// Root of one branch equation for odd `n`.
pub fn solve_branch(n: i64, branch: Branch, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<BranchRoot> {
    require_odd(n)?;
    let z0 = starting_point(n, v, cfg.precision_bits());
    let (track, reanchored) = anchor(n, &z0, v, cfg)?;
    let mut root = solve_with_track(n, branch, &z0, v, cfg, &track)?;
    root.reanchored = reanchored;
    Ok(root)
}

/// Both roots for odd `n`, sharing one square-root anchor.
pub fn solve_both_branches(n: i64, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<(BranchRoot, BranchRoot)> {
    require_odd(n)?;
    let z0 = starting_point(n, v, cfg.precision_bits());
    let (track, reanchored) = anchor(n, &z0, v, cfg)?;
    let mut e1 = solve_with_track(n, Branch::E1, &z0, v, cfg, &track)?;
    let mut e2 = solve_with_track(n, Branch::E2, &z0, v, cfg, &track)?;
    e1.reanchored = reanchored;
    e2.reanchored = reanchored;
    Ok((e1, e2))
}

/// Fixed point `z = alpha_n(z)` for even `n`.
pub fn solve_even(n: i64, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<BranchRoot> {
    if n % 2 != 0 || n.abs() < 3 {
        return Err(Error::InvalidArgument(format!("need even |n| >= 4, got {n}")));
    }
    let z0 = starting_point(n, v, cfg.precision_bits());
    let track = SqrtTrack {
        product: Scalar::zero(cfg.precision_bits()),
        root: Scalar::zero(cfg.precision_bits()),
    };
    solve_with_track(n, Branch::E1, &z0, v, cfg, &track)
}

/// `|(z - alpha_n(z))^2 - beta_n^-(z) beta_n^+(z)|` from fresh series values.
pub fn characteristic_residual(n: i64, z: &Scalar, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(Reduced::eval(n, z, v, cfg)?.residual(z))
}

/// Eigenvalue pair near `n` from the series route.
pub fn spectral_pair_series(n: i64, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<SpectralPair> {
    if n.abs() < 3 {
        return Err(Error::InvalidArgument(format!("need |n| >= 3, got {n}")));
    }
    let prec = cfg.precision_bits();
    let shift = Scalar::from_int(prec, n);
    if n % 2 == 0 {
        let root = solve_even(n, v, cfg)?;
        let mut pair = SpectralPair::double(n, &shift + &root.z, Method::Series, root.error_estimate, root.iterations);
        pair.residual = Some(root.residual);
        return Ok(pair);
    }
    let (e1, e2) = solve_both_branches(n, v, cfg)?;
    let mut pair = SpectralPair::new(
        n,
        &shift + &e1.z,
        &shift + &e2.z,
        Method::Series,
        e1.error_estimate.max(e2.error_estimate),
        e1.iterations + e2.iterations,
    );
    pair.residual = Some(e1.residual.max(e2.residual));
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::new(P, 1e-40).unwrap()
    }

    #[test]
    fn free_operator_roots_vanish() {
        let v = TrigPotential::zero(P);
        for br in [Branch::E1, Branch::E2] {
            let r = solve_branch(7, br, &v, &cfg()).unwrap();
            assert!(r.z.is_zero());
        }
        let pair = spectral_pair_series(7, &v, &cfg()).unwrap();
        assert!(pair.gamma.is_zero());
        assert_eq!(pair.lambda_minus.to_c64(), (7.0, 0.0));
    }

    #[test]
    fn even_collapse_is_exact() {
        let v = TrigPotential::from_ints(P, [1, 1, 1, 1]);
        for n in [4, -6, 10] {
            let pair = spectral_pair_series(n, &v, &cfg()).unwrap();
            assert!(pair.gamma.is_zero());
            assert_eq!(pair.lambda_minus, pair.lambda_plus);
            assert!(pair.residual.unwrap() <= 10.0 * pair.error_estimate);
        }
    }

    #[test]
    fn strong_potential_at_small_n_is_reported() {
        // the loop series diverges here: |n| is below the localization threshold
        let v = TrigPotential::from_ints(P, [1, 2, 3, 4]);
        let err = spectral_pair_series(4, &v, &cfg()).unwrap_err();
        assert!(
            matches!(err, Error::NonConvergent { .. } | Error::SolverNonConvergent { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn ordering_and_gamma() {
        let p = SpectralPair::new(
            3,
            Scalar::from_f64(P, 3.1, 0.2),
            Scalar::from_f64(P, 3.1, -0.2),
            Method::Matrix,
            0.0,
            0,
        );
        assert_eq!(p.lambda_minus.to_c64(), (3.1, -0.2));
        assert_eq!(p.gamma.to_c64().1, 0.4);
    }

    #[test]
    fn sqrt_squares_to_product() {
        let v = TrigPotential::from_ints(P, [1, 1, 1, 1]);
        let z = Scalar::from_f64(P, 0.05, 0.0);
        let c = cfg();
        let s = sqrt_beta_product(21, &z, &v, &c).unwrap();
        let prod = &beta(Sign::Minus, 21, &z, &v, &c).unwrap().value
            * &beta(Sign::Plus, 21, &z, &v, &c).unwrap().value;
        let rel = (&(&s * &s) - &prod).abs_f64() / prod.abs_f64();
        assert!(rel < 1e-60, "{rel}");
        assert!(sqrt_beta_product(8, &z, &v, &c).unwrap().is_zero());
    }

    #[test]
    fn branches_bracket_the_gap() {
        let v = TrigPotential::from_ints(P, [1, 1, 1, 1]);
        let c = cfg();
        let (e1, e2) = solve_both_branches(21, &v, &c).unwrap();
        let s = sqrt_beta_product(21, &e1.z, &v, &c).unwrap();
        let diff = &e1.z - &e2.z;
        // roots differ by 2 S up to a relative O(1/m^2)
        let rel = (&diff - &s.scale_int(2)).abs_f64() / s.abs_f64();
        assert!(rel < 0.1, "{rel}");
        assert!(e1.residual <= 10.0 * e1.error_estimate);
    }
}
