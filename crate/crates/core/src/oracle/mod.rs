//! Truncated Fourier-basis matrix of the operator, diagonalized directly.
//!
//! With `y = (y1, y2)`, `y_c = sum_k u_{c,k} e^{ikx}`, the operator acts on
//! coefficients as `(L u)_{1,k} = -k u_{1,k} + sum_l p(k-l) u_{2,l}` and
//! `(L u)_{2,k} = k u_{2,k} + sum_l q(k-l) u_{1,l}`. Periodic boundary
//! conditions keep even modes, antiperiodic ones odd modes.

mod eigen;
mod matrix;

use std::fmt;
use std::str::FromStr;

use rug::Float;

pub use eigen::{backward_error_bound, eigenvalues_all, SWEEPS_PER_DIMENSION};
pub use matrix::DenseMatrix;

use crate::error::{Error, Result};
use crate::potential::{Field, TrigPotential};
use crate::scalar::{PrecisionConfig, Scalar};
use crate::solver::{Method, SpectralPair};

/// Extra modes beyond `|n|` in the default truncation.
pub const DEFAULT_EXTRA_MODES: u32 = 40;

/// Mode increase used to estimate the truncation error.
pub const REFINEMENT_MODES: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Periodic,
    Antiperiodic,
}

impl BoundaryCondition {
    /// The condition whose spectrum clusters near `n`.
    pub fn for_index(n: i64) -> Self {
        if n % 2 == 0 {
            Self::Periodic
        } else {
            Self::Antiperiodic
        }
    }

    pub fn parity(self) -> i64 {
        match self {
            Self::Periodic => 0,
            Self::Antiperiodic => 1,
        }
    }

    /// Modes `k` with `|k| <= k_max` of the matching parity, ascending.
    pub fn modes(self, k_max: u32) -> Vec<i64> {
        let k_max = k_max as i64;
        (-k_max..=k_max)
            .filter(|k| (k - self.parity()).rem_euclid(2) == 0)
            .collect()
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Periodic => "periodic",
            Self::Antiperiodic => "antiperiodic",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" | "per+" => Ok(Self::Periodic),
            "antiperiodic" | "per-" => Ok(Self::Antiperiodic),
            other => Err(Error::InvalidArgument(format!("unknown boundary condition {other:?}"))),
        }
    }
}

/// Full spectrum of one truncated matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpectrum {
    pub bc: BoundaryCondition,
    pub k_max: u32,
    pub dimension: usize,
    /// Sorted by (re, im), with algebraic multiplicity.
    pub eigenvalues: Vec<Scalar>,
    pub precision_bits: u32,
    pub backward_error: f64,
}

impl MatrixSpectrum {
    pub fn compute(bc: BoundaryCondition, k_max: u32, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<Self> {
        let m = build_matrix(bc, k_max, v, cfg)?;
        let eigenvalues = eigenvalues_all(&m, cfg)?;
        Ok(Self {
            bc,
            k_max,
            dimension: m.rows(),
            eigenvalues,
            precision_bits: cfg.precision_bits(),
            backward_error: backward_error_bound(&m, cfg.precision_bits()).to_f64(),
        })
    }

    /// Eigenvalues with `|lambda - center| < radius`.
    pub fn in_disc(&self, center: i64, radius: f64) -> Vec<Scalar> {
        let prec = self.precision_bits;
        let c = Scalar::from_int(prec, center);
        let r = Float::with_val(prec, radius);
        self.eigenvalues
            .iter()
            .filter(|e| (*e - &c).abs() < r)
            .cloned()
            .collect()
    }
}

/// Operator matrix on the modes of `bc` with `|k| <= k_max`. Rows and
/// columns list component 1 (ascending `k`) then component 2.
pub fn build_matrix(bc: BoundaryCondition, k_max: u32, v: &TrigPotential, cfg: &PrecisionConfig) -> Result<DenseMatrix> {
    if k_max < 4 {
        return Err(Error::InvalidArgument(format!("mode cutoff must be >= 4, got {k_max}")));
    }
    let prec = cfg.precision_bits();
    let v = v.with_prec(prec);
    let modes = bc.modes(k_max);
    let len = modes.len();
    let mut m = DenseMatrix::zeros(prec, 2 * len, 2 * len);
    for (i, &k) in modes.iter().enumerate() {
        m.set(i, i, Scalar::from_int(prec, -k));
        m.set(len + i, len + i, Scalar::from_int(prec, k));
        for (j, &l) in modes.iter().enumerate() {
            if let Some(p) = v.step_coefficient(Field::P, k - l) {
                m.set(i, len + j, p.clone());
            }
            if let Some(q) = v.step_coefficient(Field::Q, k - l) {
                m.set(len + i, j, q.clone());
            }
        }
    }
    Ok(m)
}

/// The pair of eigenvalues in `|lambda - n| < 1/2` from the truncated
/// matrix. The error estimate adds the backward-error bound to the largest
/// shift seen when the cutoff grows by [`REFINEMENT_MODES`].
pub fn spectral_pair_matrix(n: i64, v: &TrigPotential, cfg: &PrecisionConfig, k_max: Option<u32>) -> Result<SpectralPair> {
    if n.abs() < 3 {
        return Err(Error::InvalidArgument(format!("need |n| >= 3, got {n}")));
    }
    let bc = BoundaryCondition::for_index(n);
    let k = k_max.unwrap_or(n.unsigned_abs() as u32 + DEFAULT_EXTRA_MODES);
    let pair_at = |k: u32| -> Result<(Vec<Scalar>, f64)> {
        let spec = MatrixSpectrum::compute(bc, k, v, cfg)?;
        let found = spec.in_disc(n, 0.5);
        if found.len() != 2 {
            return Err(Error::Localization { n, found: found.len() });
        }
        Ok((found, spec.backward_error))
    };
    let (coarse, be_coarse) = pair_at(k)?;
    let (fine, be_fine) = pair_at(k + REFINEMENT_MODES)?;
    let shift = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs_f64())
        .fold(0.0, f64::max);
    let estimate = be_coarse.max(be_fine) + shift;
    let mut it = fine.into_iter();
    let (a, b) = (it.next().expect("two"), it.next().expect("two"));
    Ok(SpectralPair::new(n, a, b, Method::Matrix, estimate, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::new(P, 1e-30).unwrap()
    }

    #[test]
    fn free_spectrum_periodic() {
        let s = MatrixSpectrum::compute(BoundaryCondition::Periodic, 4, &TrigPotential::zero(P), &cfg()).unwrap();
        let got: Vec<f64> = s.eigenvalues.iter().map(|e| e.to_c64().0).collect();
        assert_eq!(got, vec![-4.0, -4.0, -2.0, -2.0, 0.0, 0.0, 2.0, 2.0, 4.0, 4.0]);
        assert_eq!(s.dimension, 10);
    }

    #[test]
    fn row_structure() {
        let v = TrigPotential::from_ints(P, [1, 2, 3, 4]);
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Antiperiodic] {
            let m = build_matrix(bc, 9, &v, &cfg()).unwrap();
            for i in 0..m.rows() {
                assert!(m.row_off_diagonal_count(i) <= 2);
                for j in 0..m.cols() {
                    let x = m.get(i, j).abs_f64();
                    if i != j && x != 0.0 {
                        assert!([1.0, 2.0, 3.0, 4.0].contains(&x));
                    }
                }
            }
        }
    }

    #[test]
    fn cutoff_validated() {
        assert!(build_matrix(BoundaryCondition::Periodic, 3, &TrigPotential::zero(P), &cfg()).is_err());
    }

    #[test]
    fn localization_failure_reports_count() {
        // strong potential: the pair near 7 sits outside the unit-width disc
        let v = TrigPotential::from_ints(P, [1, 2, 3, 4]);
        let e = spectral_pair_matrix(7, &v, &cfg(), None).unwrap_err();
        assert_eq!(e, Error::Localization { n: 7, found: 0 });
    }
}
