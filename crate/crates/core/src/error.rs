use thiserror::Error;

/// Every failure the engine can report. Variants map one-to-one onto the
/// typed failure modes of the individual modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value has an irrational cyclotomic component: {0}")]
    NotRational(String),
    #[error("product of two empty truncated series has no defined truncation")]
    EmptySeriesTruncation,
    #[error("series is zero up to its truncation and cannot be inverted")]
    NonInvertible,
    #[error("coefficient of exponent {exponent} requested but series is only known below {trunc}")]
    TruncationUnderflow { exponent: i64, trunc: i64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid curve: {0}")]
    Validation(String),
    #[error("index floor touches an infinite pole order on non-final component {0}")]
    InfiniteShift(u32),
    #[error("curve is not admissible: {0}")]
    NotAdmissible(String),
    #[error("y(z') - y(z) vanishes identically for home component {0}")]
    IdenticallyZero(u32),
    #[error("fiber points coincide")]
    CoincidentPoints,
    #[error("correlator level (g2={g2}, n={n}) is missing from the store")]
    MissingLevel { g2: u32, n: u32 },
    #[error("asymmetric correlator at (g2={g2}, n={n}) for legs {legs:?}: {values:?}")]
    Asymmetric {
        g2: u32,
        n: u32,
        legs: Vec<(u32, u32)>,
        values: Vec<String>,
    },
    #[error("integrand has a fractional exponent {0}/L with nonzero coefficient")]
    NonSingleValued(i64),
    #[error("relation does not apply to this curve: {0}")]
    ShapeMismatch(String),
    #[error("mode is not in normal form: {0}")]
    NotNormalForm(String),
    #[error("closed form not applicable: {0}")]
    NotApplicable(String),
    #[error("closed form requires symmetric case: {0}")]
    NotSymmetricCase(String),
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("curve has the wrong shape for extraction: {0}")]
    WrongCurveShape(String),
    #[error("dimension constraint violated: {0}")]
    DimensionMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
