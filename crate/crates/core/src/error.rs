use alloc::string::String;

/// Errors raised by construction and verification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |A - A^dagger| = {asymmetry:e} at ({row}, {col})")]
    NotHermitian { asymmetry: f64, row: usize, col: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("d must be prime, got {0}")]
    NotPrime(usize),

    #[error("unsupported dimension {0}: mutually unbiased bases are shipped for d in {{2, 3, 5}}")]
    UnsupportedDimension(usize),

    #[error("invalid operator basis: {0}")]
    InvalidBasis(String),

    #[error("t = {t} is outside the admissible range: minimum eigenvalue {min_eigenvalue:e}")]
    InadmissibleT { t: f64, min_eigenvalue: f64 },

    #[error("x = {x} is outside ({lower}, {upper}]")]
    ParameterOutOfRange { x: f64, lower: f64, upper: f64 },

    #[error("operators violate the symmetric-measurement constraints: residual {residual:e}")]
    NotSymmetric { residual: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("expected {expected} coefficients, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("family is not built from a complete set of mutually unbiased bases")]
    NotMub,

    #[error("family is not informationally complete: N(M - 1) = {actual}, d^2 - 1 = {expected}")]
    NotInformationallyComplete { expected: usize, actual: usize },

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("time {t} outside the trajectory grid [{start}, {end}]")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },

    #[error("quadrature refinement disagrees by {difference:e}")]
    QuadratureMismatch { difference: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
