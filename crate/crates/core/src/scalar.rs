//! Precision-configurable complex scalars.
//!
//! [`Scalar`] is a pair of MPFR reals sharing one binary precision. Every
//! constructor takes the precision explicitly; binary operations produce a
//! result at the larger precision of the two operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Working precision and iteration/series tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionConfig {
    precision_bits: u32,
    rel_tol: f64,
}

impl PrecisionConfig {
    pub const DEFAULT_BITS: u32 = 256;
    pub const DEFAULT_REL_TOL: f64 = 1e-30;

    pub fn new(precision_bits: u32, rel_tol: f64) -> Result<Self> {
        if precision_bits < 53 {
            return Err(Error::InvalidArgument(format!(
                "precision_bits must be at least 53, got {precision_bits}"
            )));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        // 2^(4 - bits) underflows f64 for very large precisions; compare logs.
        let floor_log2 = 4.0 - f64::from(precision_bits);
        if rel_tol.log2() < floor_log2 {
            return Err(Error::InvalidArgument(format!(
                "rel_tol {rel_tol:e} is below 2^{floor_log2} for {precision_bits}-bit precision"
            )));
        }
        Ok(Self {
            precision_bits,
            rel_tol,
        })
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    /// `rel_tol` as a float at the working precision.
    pub fn rel_tol_float(&self) -> Float {
        Float::with_val(self.precision_bits, self.rel_tol)
    }

    /// Unit roundoff 2^(1 - bits).
    pub fn epsilon(&self) -> Float {
        Float::with_val(self.precision_bits, 1) >> (self.precision_bits - 1)
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self {
            precision_bits: Self::DEFAULT_BITS,
            rel_tol: Self::DEFAULT_REL_TOL,
        }
    }
}

/// Arbitrary-precision complex number.
#[derive(Clone, PartialEq)]
pub struct Scalar {
    re: Float,
    im: Float,
}

impl Scalar {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(prec, 1)
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        let mut s = Self::zero(prec);
        s.re.assign(&re);
        s.im.assign(&im);
        s
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Float::new(prec),
        }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_int(prec: u32, re: i64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::new(prec),
        }
    }

    /// Parses decimal real and imaginary parts at the given precision.
    pub fn parse_parts(prec: u32, re: &str, im: &str) -> Result<Self> {
        let parse = |s: &str| {
            Float::parse(s)
                .map(|p| Float::with_val(prec, p))
                .map_err(|e| Error::InvalidArgument(format!("bad real literal {s:?}: {e}")))
        };
        Ok(Self {
            re: parse(re)?,
            im: parse(im)?,
        })
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Same value rounded to another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut out = Float::with_val(self.prec(), self.re.square_ref());
        out += Float::with_val(self.prec(), self.im.square_ref());
        out
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// `|self|` rounded to f64; saturates to 0 / inf outside the f64 range.
    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec()) / self
    }

    /// Principal square root (branch cut along the negative real axis).
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return Self::zero(prec);
        }
        let r = self.abs();
        let two = Float::with_val(prec, 2);
        if self.re.is_sign_positive() {
            let t = Float::with_val(prec, &r + &self.re);
            let t = Float::with_val(prec, &t / &two).sqrt();
            let im = Float::with_val(prec, &self.im / &t) / &two;
            Self { re: t, im }
        } else {
            let t = Float::with_val(prec, &r - &self.re);
            let t = Float::with_val(prec, &t / &two).sqrt();
            let re = Float::with_val(prec, self.im.abs_ref()) / &t / &two;
            let im = if self.im.is_sign_negative() { -t } else { t };
            Self { re, im }
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Self {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    pub fn powi(&self, exp: u32) -> Self {
        let mut result = Self::one(self.prec());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let prec = self.prec();
        Self {
            re: Float::with_val(prec, &self.re * factor),
            im: Float::with_val(prec, &self.im * factor),
        }
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        let mut out = self.clone();
        out.re *= factor;
        out.im *= factor;
        out
    }

    /// `self += a * b` without allocating the product.
    pub fn add_mul(&mut self, a: &Scalar, b: &Scalar, scratch: &mut Float) {
        scratch.assign(&a.re * &b.re);
        self.re += &*scratch;
        scratch.assign(&a.im * &b.im);
        self.re -= &*scratch;
        scratch.assign(&a.re * &b.im);
        self.im += &*scratch;
        scratch.assign(&a.im * &b.re);
        self.im += &*scratch;
    }

    /// Overwrites `self` with `a * b`.
    pub fn assign_mul(&mut self, a: &Scalar, b: &Scalar, scratch: &mut Float) {
        self.re.assign(&a.re * &b.re);
        scratch.assign(&a.im * &b.im);
        self.re -= &*scratch;
        self.im.assign(&a.re * &b.im);
        scratch.assign(&a.im * &b.re);
        self.im += &*scratch;
    }

    /// Copies `other` into `self`, rounding to `self`'s precision.
    pub fn assign(&mut self, other: &Scalar) {
        self.re.assign(&other.re);
        self.im.assign(&other.im);
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Float, &mut Float) {
        (&mut self.re, &mut self.im)
    }

    pub fn set_zero(&mut self) {
        self.re.assign(0);
        self.im.assign(0);
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Lexicographic order on (re, im), the eigenvalue ordering convention.
    pub fn lex_cmp(&self, other: &Scalar) -> Ordering {
        self.re
            .partial_cmp(&other.re)
            .unwrap_or(Ordering::Equal)
            .then(self.im.partial_cmp(&other.im).unwrap_or(Ordering::Equal))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {} {}i)",
            format_sci(&self.re, 12),
            if self.im.is_sign_negative() { '-' } else { '+' },
            format_sci(&Float::with_val(self.im.prec(), self.im.abs_ref()), 12)
        )
    }
}

/// Decimal scientific notation with `digits` significant digits, e.g.
/// `-1.25000e-3`. Zero renders as `0.0...e0` with the same digit count.
pub fn format_sci(x: &Float, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_zero() {
        let mantissa = if digits > 1 {
            format!("0.{}", "0".repeat(digits - 1))
        } else {
            "0".to_string()
        };
        return if x.is_sign_negative() {
            format!("-{mantissa}e0")
        } else {
            format!("{mantissa}e0")
        };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (negative, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    let exp = exp.unwrap_or(0) - 1;
    let mut out = String::with_capacity(digits + 8);
    if negative {
        out.push('-');
    }
    out.push_str(&mantissa[..1]);
    if digits > 1 {
        out.push('.');
        out.push_str(&mantissa[1..]);
    }
    out.push('e');
    out.push_str(&exp.to_string());
    out
}

/// Euler–Mascheroni constant at the given precision.
pub fn euler_gamma(prec: u32) -> Float {
    Float::with_val(prec, Constant::Euler)
}

/// m! as a float.
pub fn factorial(prec: u32, m: u32) -> Float {
    Float::with_val(prec, Float::factorial(m))
}

/// 4^(2m) (m!)^2, the denominator of the single-walk closed forms.
pub fn closed_form_denominator(prec: u32, m: u32) -> Float {
    let f = factorial(prec, m);
    let four = Float::with_val(prec, 4);
    Float::with_val(prec, four.pow(2 * m)) * f.square()
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let prec = self.prec().max(rhs.prec());
        Scalar {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let prec = self.prec().max(rhs.prec());
        Scalar {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let prec = self.prec().max(rhs.prec());
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re -= Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.re * &rhs.im);
        im += Float::with_val(prec, &self.im * &rhs.re);
        Scalar { re, im }
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let prec = self.prec().max(rhs.prec());
        let denom = rhs.norm_sqr();
        let mut re = Float::with_val(prec, &self.re * &rhs.re);
        re += Float::with_val(prec, &self.im * &rhs.im);
        let mut im = Float::with_val(prec, &self.im * &rhs.re);
        im -= Float::with_val(prec, &self.re * &rhs.im);
        re /= &denom;
        im /= &denom;
        Scalar { re, im }
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
        (a - b).abs_f64() <= tol * (1.0 + b.abs_f64())
    }

    #[test]
    fn config_validation() {
        assert!(PrecisionConfig::new(52, 1e-10).is_err());
        assert!(PrecisionConfig::new(64, 0.0).is_err());
        assert!(PrecisionConfig::new(64, 1.0).is_err());
        // 2^(4-64) ~ 8.7e-19
        assert!(PrecisionConfig::new(64, 1e-19).is_err());
        assert!(PrecisionConfig::new(64, 1e-17).is_ok());
        let d = PrecisionConfig::default();
        assert_eq!(d.precision_bits(), 256);
        assert_eq!(d.rel_tol(), 1e-30);
    }

    #[test]
    fn field_arithmetic() {
        let a = Scalar::from_f64(P, 1.5, -2.0);
        let b = Scalar::from_f64(P, -0.25, 3.0);
        let q = &a / &b;
        assert!(close(&(&q * &b), &a, 1e-70));
        let s = &(&a + &b) - &b;
        assert!(close(&s, &a, 1e-75));
        assert!(close(&(&a * &a.recip()), &Scalar::one(P), 1e-70));
    }

    #[test]
    fn sqrt_is_principal() {
        for (re, im) in [(4.0, 0.0), (-4.0, 0.0), (0.0, 2.0), (-3.0, -4.0), (3.0, -4.0)] {
            let z = Scalar::from_f64(P, re, im);
            let r = z.sqrt();
            assert!(close(&(&r * &r), &z, 1e-70), "{re} {im}");
            assert!(r.re().is_sign_positive() || r.re().is_zero());
        }
        let r = Scalar::from_f64(P, -4.0, 0.0).sqrt();
        assert!(close(&r, &Scalar::from_f64(P, 0.0, 2.0), 1e-70));
    }

    #[test]
    fn ln_inverts_exp_magnitude() {
        let z = Scalar::from_f64(P, 0.0, 1.0);
        let l = z.ln();
        assert!(l.re().is_zero() || l.re().clone().abs() < 1e-70);
        let half_pi = Float::with_val(P, Constant::Pi) / 2;
        assert!((Float::with_val(P, l.im() - &half_pi)).abs() < 1e-70);
    }

    #[test]
    fn in_place_products_match() {
        let a = Scalar::from_f64(P, 0.3, 0.7);
        let b = Scalar::from_f64(P, -1.1, 0.2);
        let mut scratch = Float::new(P);
        let mut acc = Scalar::from_f64(P, 1.0, 1.0);
        acc.add_mul(&a, &b, &mut scratch);
        let expect = &Scalar::from_f64(P, 1.0, 1.0) + &(&a * &b);
        assert!(close(&acc, &expect, 1e-75));
        let mut out = Scalar::zero(P);
        out.assign_mul(&a, &b, &mut scratch);
        assert!(close(&out, &(&a * &b), 1e-75));
    }

    #[test]
    fn powi_and_closed_form_denominator() {
        let z = Scalar::from_f64(P, 0.0, 2.0);
        assert!(close(&z.powi(3), &Scalar::from_f64(P, 0.0, -8.0), 1e-75));
        // 4^2 * (1!)^2 = 16; 4^6 * (3!)^2 = 147456
        assert_eq!(closed_form_denominator(P, 1).to_f64(), 16.0);
        assert_eq!(closed_form_denominator(P, 3).to_f64(), 147456.0);
    }

    #[test]
    fn sci_format() {
        let x = Float::with_val(P, -0.00125);
        assert_eq!(format_sci(&x, 6), "-1.25000e-3");
        assert_eq!(format_sci(&Float::with_val(P, 5.96), 3), "5.96e0");
        assert_eq!(format_sci(&Float::new(P), 3), "0.00e0");
    }
}
