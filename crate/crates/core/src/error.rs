use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("exponent p must be a finite positive number, got {0}")]
    InvalidExponent(f64),

    #[error("concavity modulus must be >= 1, got {0}")]
    InvalidModulus(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("defect undefined at x = y = 0")]
    ZeroPair,

    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    #[error("witness list is empty")]
    EmptyWitnesses,

    #[error("zero witness at position {0}")]
    ZeroWitness(usize),

    #[error("map does not commute with signed permutations: {0}")]
    CommutationFailed(String),

    #[error("certificate target mismatch: |sum c_j x_j - target| = {residual:e}")]
    ReconstructionMismatch { residual: f64 },

    #[error("coefficient count {coefficients} does not match point count {points}")]
    CoefficientCount { points: usize, coefficients: usize },

    #[error("unknown map kind `{0}`")]
    UnknownMapKind(String),

    #[error("no certified quasilinearity bound for `{0}`")]
    MissingCertificate(String),

    #[error("profile requires a finite sup norm")]
    UnboundedProfile,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("index {n} is too small (need n >= {min})")]
    IndexTooSmall { n: usize, min: usize },

    #[error("index grid needs at least {min} entries, got {len}")]
    GridTooShort { len: usize, min: usize },

    #[error("index grid must be strictly increasing")]
    GridNotSorted,

    #[error("restricted map is numerically linear at n = {n} (residual norm {norm:e})")]
    DegenerateTruncation { n: usize, norm: f64 },

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("family builder failed at n = {n}: {source}")]
    Builder { n: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
