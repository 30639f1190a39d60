use thiserror::Error;

use crate::expr::{EvalError, Witness};

/// Projector axiom that failed validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariant {
    Symmetry,
    Complementarity,
    Idempotency,
    Orthogonality,
    Trace,
    SquareRoot,
    MixedForm,
}

impl std::fmt::Display for Invariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Invariant::Symmetry => "symmetry",
            Invariant::Complementarity => "complementarity",
            Invariant::Idempotency => "idempotency",
            Invariant::Orthogonality => "orthogonality",
            Invariant::Trace => "trace",
            Invariant::SquareRoot => "square root",
            Invariant::MixedForm => "mixed form",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Evaluation(#[from] EvalError),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("metric is not symmetric at component ({0}, {1})")]
    AsymmetricMetric(usize, usize),
    #[error("metric determinant vanishes on the sampling box")]
    SingularMetric,
    #[error("slot variance mismatch: {0}")]
    SlotVarianceMismatch(String),
    #[error("tensor fields live on different charts")]
    ChartMismatch,
    #[error("the selected distribution is null (block Gram matrix is singular)")]
    NullDistribution,
    #[error("projector validation failed: {invariant} ({witness:?})")]
    ValidationFailure {
        invariant: Invariant,
        witness: Option<Box<Witness>>,
    },
    #[error("projector trace is not a constant integer")]
    NonIntegerTrace,
    #[error("rank p = {p} is excluded here for n = {n}")]
    DegenerateRank { n: usize, p: usize },
    #[error("rank p = {p} is outside 1..=n-1 for n = {n}")]
    InvalidRank { n: usize, p: usize },
    #[error("curve leaves the sampling box at t = {t}")]
    StepOutsideBox { t: f64 },
    #[error("constraint residual {residual:e} exceeds bound {bound:e} at t = {t}")]
    ResidualBlowup { t: f64, residual: f64, bound: f64 },
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
