//! Error types shared by all kernels.

use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter record violates one of its invariants.
    InvalidParams(&'static str),
    /// An integrator or ensemble configuration is unusable.
    InvalidConfig(&'static str),
    /// A trajectory component exceeded the divergence threshold
    /// (positive-P escaping trajectory) or became non-finite.
    Divergence { t: f64, magnitude: f64 },
    /// The fraction of diverged trajectories exceeded the run budget.
    DivergenceBudgetExceeded { diverged: u64, total: u64 },
    /// Standard-error estimation needs at least 10 batches.
    InsufficientBatches { got: usize },
    /// The quadratic gain equation is degenerate (a = 0); the witness
    /// was evaluated at g = 0 instead.
    DegenerateGain,
    /// A conditioning quadrature has vanishing variance, so the
    /// steering regression gain is undefined.
    ZeroConditioningVariance,
    /// A covariance was requested without recording which ordering
    /// correction applies.
    OrderingTagMissing,
    /// Population leaked into the top Fock level of the truncated basis.
    Truncation { top_population: f64 },
    /// The master-equation trace drifted beyond tolerance.
    StepSize { trace_error: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Divergence { t, magnitude } => {
                write!(f, "trajectory diverged at t = {t} (|component| = {magnitude:e})")
            }
            Error::DivergenceBudgetExceeded { diverged, total } => {
                write!(f, "diverged trajectory budget exceeded: {diverged} of {total}")
            }
            Error::InsufficientBatches { got } => {
                write!(f, "standard-error estimation needs >= 10 batches, got {got}")
            }
            Error::DegenerateGain => write!(f, "degenerate gain equation (a = 0)"),
            Error::ZeroConditioningVariance => {
                write!(f, "conditioning quadrature has zero variance")
            }
            Error::OrderingTagMissing => write!(f, "covariance ordering tag missing"),
            Error::Truncation { top_population } => {
                write!(f, "Fock truncation inadequate: top-level population {top_population:e}")
            }
            Error::StepSize { trace_error } => {
                write!(f, "master-equation trace drift {trace_error:e} exceeds tolerance")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
