use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("potential coefficient {name} is zero; the closed-form predictors need a, A, b, B all nonzero")]
    ZeroCoefficient { name: &'static str },

    #[error("denominator vanishes at vertex {vertex} (step {step})")]
    SingularDenominator { vertex: i64, step: usize },

    #[error("|z| = {abs_z:e} lies outside the disc |z| <= 1/2")]
    OutsideDisc { abs_z: f64 },

    #[error("walk enumeration of {steps} steps exceeds the brute-force cap of {cap}")]
    TooLarge { steps: usize, cap: usize },

    #[error("series for n = {n} did not converge within {terms} terms (last term ratio {last_ratio:e})")]
    NonConvergent { n: i64, terms: usize, last_ratio: f64 },

    #[error("branch of sqrt(beta^- beta^+) unstable for n = {n}: |r| = {ratio:e} >= 1/2")]
    BranchInstability { n: i64, ratio: f64 },

    #[error("root iteration for n = {n} did not converge in {iterations} iterations (last step {last_step:e})")]
    SolverNonConvergent {
        n: i64,
        iterations: usize,
        last_step: f64,
    },

    #[error("disc |lambda - {n}| < 1/2 holds {found} eigenvalues, expected 2")]
    Localization { n: i64, found: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
