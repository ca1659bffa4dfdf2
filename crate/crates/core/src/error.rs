use thiserror::Error;

/// Errors raised by the correlation engine and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),

    #[error("measure or observable is not defined on a product space")]
    NotAProductSpace,

    #[error("mixture weights sum to {}, expected 1", shown(*sum))]
    WeightSumInvalid { sum: f64 },

    #[error("outcome spaces do not match")]
    SpaceMismatch,

    #[error(
        "absolute continuity violated at {point}: numerator {numerator:.3e} over vanishing denominator {denominator:.3e}"
    )]
    AbsoluteContinuityViolation {
        point: String,
        numerator: f64,
        denominator: f64,
    },

    #[error("observable is not projective")]
    NotProjective,

    #[error("effects for `{left}` and `{right}` do not commute (commutator norm {norm:.3e})")]
    NonCommuting {
        left: String,
        right: String,
        norm: f64,
    },

    #[error("joint observable does not reproduce the given marginal observables")]
    JointMarginalMismatch,

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Value rounded to 12 decimals for diagnostics, so `0.9799999999999999`
/// prints as `0.98`.
pub(crate) fn shown(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}
