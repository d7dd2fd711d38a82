use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the laboratory.
///
/// Variants split into two families: input validation (bad parameter,
/// malformed file) and numerical preconditions that a well-formed input can
/// still violate (irrational ratio, singular symbol, exhausted search).
/// The CLI maps the first family to exit status 2 and the second to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("exponent q = {q} outside the admissible range {range}")]
    ExponentOutOfRange { q: f64, range: &'static str },

    #[error("field has {found} components, expected {expected}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("symbol denominator vanishes at {0}")]
    SingularPoint(String),

    #[error("no lattice combination found within bound {bound}")]
    NotFound { bound: u64 },

    #[error("infimum of positive lattice elements is zero: (2π/T)/ω is irrational, so the smallness condition cannot hold for λ > 0")]
    InfimumZero,

    #[error("(2π/T)/ω must be rational for a time-periodic solution; got an irrational ratio")]
    IrrationalRatio,

    #[error("the operation needs a rational ratio (2π/T)/ω = c/d")]
    RationalRequired,

    #[error("no admissible parameters: clause `{clause}` cannot be satisfied")]
    Infeasible { clause: &'static str },

    #[error("item n = {n}: |s_n| = {s_abs} < 1/n; n is not large enough for this ratio")]
    SmallS { n: u64, s_abs: f64 },

    #[error("n_time_nodes = {got} is below the required {needed} for angular bandwidth {bandwidth}")]
    InsufficientTimeNodes {
        got: usize,
        needed: usize,
        bandwidth: usize,
    },

    #[error("{0}")]
    Precondition(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed field dump: {0}")]
    Dump(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the mathematics of the input rather than
    /// its form.
    pub fn is_numerical_precondition(&self) -> bool {
        matches!(
            self,
            Error::SingularPoint(_)
                | Error::NotFound { .. }
                | Error::InfimumZero
                | Error::IrrationalRatio
                | Error::RationalRequired
                | Error::Infeasible { .. }
                | Error::SmallS { .. }
                | Error::InsufficientTimeNodes { .. }
                | Error::Precondition(_)
        )
    }
}
