use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    Precision(String),
    #[error("series expansion data mismatch: {0}")]
    SeriesMismatch(String),
    #[error("no rational with denominator <= {max_den} within tolerance of {value}")]
    NoCandidate { value: String, max_den: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed operator: {0}")]
    MalformedOperator(String),
    #[error("{0} is not a regular singular point")]
    IrregularPoint(String),
    #[error("unsupported local exponents: {0}")]
    UnsupportedExponents(String),
    #[error("evaluation point outside the certified disk: {0}")]
    OutsideDisk(String),
    #[error("series tail {tail:e} above tolerance at truncation order {order}")]
    Truncation { tail: f64, order: usize },
    #[error("path violates an exclusion radius: {0}")]
    Exclusion(String),
    #[error("path endpoints do not chain: {0}")]
    EndpointMismatch(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("pairing row is not invariant under the contour monodromy")]
    NotInvariant,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("unknown singularity label {0}")]
    UnknownSingularity(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
