use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem dimensions must all be >= 2 and multiply to {expected}, got {dims:?}")]
    InvalidDims { dims: Vec<usize>, expected: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator has negative eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("invalid subsystem selection {keep:?} for {count} subsystems")]
    InvalidSubsystems { keep: Vec<usize>, count: usize },

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("probabilities must be non-negative and sum to 1 (sum = {0})")]
    InvalidProbabilities(f64),

    #[error("Kraus operators are not complete (deviation {0:e})")]
    IncompleteKraus(f64),

    #[error("POVM elements do not sum to identity (deviation {0:e})")]
    IncompletePovm(f64),

    #[error("map is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("ensemble contains mixed states; a pure-state ensemble is required")]
    MixedEnsemble,

    #[error("cannot tune a two-state cloner on a pair with |overlap| = {0}")]
    DegeneratePair(f64),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("unknown strategy `{0}` (expected me-pc, me-filter-tsc or usd-pc)")]
    UnknownStrategy(String),

    #[error("infeasible: qber {qber} is not reachable by {strategy} at V = {visibility}")]
    Infeasible {
        strategy: &'static str,
        visibility: f64,
        qber: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
