use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),

    #[error("parameter t = {t} outside [{lo}, {hi}] for d = {d}")]
    OutOfRange { d: usize, t: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("secular root did not converge in {iterations} iterations on [{lo}, {hi}]")]
    ConvergenceFailure { lo: f64, hi: f64, iterations: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("sum mismatch: {0} vs {1}")]
    SumMismatch(f64, f64),

    #[error("index {index} out of bounds for length {len}")]
    IndexError { index: usize, len: usize },

    #[error("k = {k} outside the admissible range {lo}..={hi}")]
    BadK { k: usize, lo: usize, hi: usize },

    #[error("t = 0 makes c2 vanish; this quantity is undefined")]
    ZeroT,

    #[error("t = {t} must lie in [{lo}, 0) for d = {d}")]
    BadT { d: usize, t: f64, lo: f64 },

    #[error("expected vector of length {expected}, got {found}")]
    BadLength { expected: usize, found: usize },

    #[error("expected exactly one negative coordinate, found {0}")]
    BadSignPattern(usize),

    #[error("coordinate {index} is too close to zero ({value:e})")]
    NearZeroNu { index: usize, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}
