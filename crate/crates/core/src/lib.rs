//! Periodic and antiperiodic eigenvalue pairs of the one-dimensional Dirac
//! operator `L = i diag(1, -1) d/dx + [[0, P], [Q, 0]]` on `[0, pi]` with
//! `P(x) = a e^{-2ix} + A e^{2ix}` and `Q(x) = b e^{-2ix} + B e^{2ix}`.
//!
//! Three independent routes to the pair `lambda_n^±` near an integer `n`:
//!
//! * [`series`] + [`solver`]: walk-sum expansions of the 2x2 reduced
//!   problem `(z - alpha_n(z))^2 = beta_n^-(z) beta_n^+(z)`, solved near
//!   `z = 0` (`lambda = n + z`);
//! * [`oracle`]: the operator in a truncated Fourier basis, diagonalized by
//!   shifted QR at arbitrary precision;
//! * [`asymptotics`]: closed-form large-`n` predictions.
//!
//! [`walks`] enumerates the underlying walks by brute force and serves as
//! the reference for the dynamic-programming sums.

pub mod asymptotics;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod walks;

pub use error::{Error, Result};
pub use potential::{Field, TrigPotential};
pub use scalar::{PrecisionConfig, Scalar};
pub use series::{SeriesValue, Sign};
pub use solver::{Method, SpectralPair};
