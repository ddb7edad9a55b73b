use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not normal (commutator norm {0:.3e})")]
    NotNormal(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrices do not commute (commutator norm {0:.3e})")]
    NotCommuting(f64),

    #[error("failed to find a simultaneous eigenbasis after {0} attempts")]
    NoSharedBasis(usize),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("norm {norm:.6} exceeds subnormalization {alpha:.6}")]
    NormTooLarge { norm: f64, alpha: f64 },

    #[error("postselection probability {0:.3e} is zero")]
    ZeroProbability(f64),

    #[error("polynomial sup norm {0:.9} exceeds 1 on [-1, 1]")]
    PolyNotBounded(f64),

    #[error("spectrum extends to {0:.9}, outside [-1, 1]")]
    SpectrumOutOfRange(f64),

    #[error("polynomial degree {degree} does not fit bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },

    #[error("nodes are not distinct (gap {0:.3e})")]
    DuplicateNodes(f64),

    #[error("index {index} out of range for {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("function returned a non-finite value at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("all coefficients are zero")]
    AllZeroCoefficients,

    #[error("evolution time times subnormalization {scaled:.6} exceeds {limit}")]
    TimeOutOfRange { scaled: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator on {0} qubits is too large to materialise")]
    TooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
