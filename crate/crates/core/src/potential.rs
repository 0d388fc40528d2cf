//! The two-mode trigonometric potential
//! `P(x) = a e^{-2ix} + A e^{2ix}`, `Q(x) = b e^{-2ix} + B e^{2ix}`.

use rug::Float;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which off-diagonal entry of the potential matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    P,
    Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPotential {
    a: Scalar,
    big_a: Scalar,
    b: Scalar,
    big_b: Scalar,
    max_abs: Float,
}

impl TrigPotential {
    /// Coefficients in the order a, A, b, B.
    pub fn new(a: Scalar, big_a: Scalar, b: Scalar, big_b: Scalar) -> Self {
        let mut max_abs = a.abs();
        for c in [&big_a, &b, &big_b] {
            let m = c.abs();
            if m > max_abs {
                max_abs = m;
            }
        }
        Self {
            a,
            big_a,
            b,
            big_b,
            max_abs,
        }
    }

    /// Real integer coefficients, convenient for tests and examples.
    pub fn from_ints(prec: u32, coeffs: [i64; 4]) -> Self {
        let [a, aa, b, bb] = coeffs.map(|c| Scalar::from_int(prec, c));
        Self::new(a, aa, b, bb)
    }

    /// Complex coefficients given as `(re, im)` pairs.
    pub fn from_c64(prec: u32, coeffs: [(f64, f64); 4]) -> Self {
        let [a, aa, b, bb] = coeffs.map(|(re, im)| Scalar::from_f64(prec, re, im));
        Self::new(a, aa, b, bb)
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_ints(prec, [0, 0, 0, 0])
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }
    #[allow(non_snake_case)]
    pub fn A(&self) -> &Scalar {
        &self.big_a
    }
    pub fn b(&self) -> &Scalar {
        &self.b
    }
    #[allow(non_snake_case)]
    pub fn B(&self) -> &Scalar {
        &self.big_b
    }

    pub fn coefficients(&self) -> [&Scalar; 4] {
        [&self.a, &self.big_a, &self.b, &self.big_b]
    }

    /// D = max{|a|, |A|, |b|, |B|}.
    pub fn max_abs(&self) -> &Float {
        &self.max_abs
    }

    pub fn prec(&self) -> u32 {
        self.a.prec()
    }

    pub fn is_fully_nonzero(&self) -> bool {
        self.coefficients().iter().all(|c| !c.is_zero())
    }

    /// Errors with the first vanishing coefficient, if any.
    pub fn require_nonzero(&self) -> Result<()> {
        for (name, c) in ["a", "A", "b", "B"].into_iter().zip(self.coefficients()) {
            if c.is_zero() {
                return Err(Error::ZeroCoefficient { name });
            }
        }
        Ok(())
    }

    /// The potential with P and Q exchanged: (a, A, b, B) -> (b, B, a, A).
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            big_a: self.big_b.clone(),
            b: self.a.clone(),
            big_b: self.big_a.clone(),
            max_abs: self.max_abs.clone(),
        }
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let [a, aa, b, bb] = self.coefficients().map(|c| c.with_prec(prec));
        Self::new(a, aa, b, bb)
    }

    /// Ab
    pub fn ab_upper_lower(&self) -> Scalar {
        &self.big_a * &self.b
    }

    /// aB
    pub fn ab_lower_upper(&self) -> Scalar {
        &self.a * &self.big_b
    }

    /// Fourier coefficient of P or Q at the even frequency `m`.
    pub fn fourier_coefficient(&self, which: Field, m: i64) -> Result<Scalar> {
        if m % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "Fourier index must be even, got {m}"
            )));
        }
        Ok(self
            .step_coefficient(which, m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.prec())))
    }

    /// Coefficient for a ±2 step; `None` for every other frequency.
    pub(crate) fn step_coefficient(&self, which: Field, m: i64) -> Option<&Scalar> {
        match (which, m) {
            (Field::P, -2) => Some(&self.a),
            (Field::P, 2) => Some(&self.big_a),
            (Field::Q, -2) => Some(&self.b),
            (Field::Q, 2) => Some(&self.big_b),
            _ => None,
        }
    }
}
