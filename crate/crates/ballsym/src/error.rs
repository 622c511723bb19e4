use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies outside the open unit ball (|z|^2 = {norm_sq})")]
    OutsideBall { norm_sq: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is ill-conditioned (condition estimate {estimate:e})")]
    IllConditioned { estimate: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown identity id `{0}`")]
    UnknownIdentity(String),
    #[error("grid size {grid} too small for jet order {order} (need at least {})", 2 * order + 2)]
    GridTooSmall { grid: usize, order: usize },
    #[error("all jet coefficients up to order {order} are below {tol:e}")]
    NoNonvanishingJet { order: usize, tol: f64 },
    #[error("matrix does not preserve the form diag(1,..,1,-1) (residual {residual:e})")]
    NotFormPreserving { residual: f64 },
    #[error("gamma function pole: {0}")]
    GammaPole(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
