use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix contains NaN or infinite entries")]
    NotFinite,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("transform size {0} is not a power of two")]
    SizeNotPowerOfTwo(usize),
    #[error("threshold must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("transform is not orthogonal (max deviation {0:.3e})")]
    NotOrthogonal(f64),
    #[error("observation mask selects no entries")]
    EmptyMask,
    #[error("invalid clique size k={k} for n={n}")]
    InvalidK { k: usize, n: usize },
    #[error("radius {eps} is smaller than the distance {dist:.3e} from y to the range of A")]
    InfeasibleRadius { eps: f64, dist: f64 },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("sampling rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown problem family `{0}`")]
    UnknownFamily(String),
    #[error("parse error: {0}")]
    Parse(String),
}
