use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (pivot {pivot:.3e})")]
    NotPositiveSemidefinite { pivot: f64 },

    #[error(
        "principal log undefined: eigenvalue {re:.6e}{im:+.6e}i lies on or near the \
         negative real axis (decoherence time too long for an unambiguous branch)"
    )]
    LogUndefined { re: f64, im: f64 },

    #[error("matrix logarithm failed to reproduce its argument (residual {residual:.3e})")]
    LogInaccurate { residual: f64 },

    #[error("objective diverged (non-finite value)")]
    ObjectiveDiverged,

    #[error("chi is not completely positive (min eigenvalue {min_eigenvalue:.3e}); run the CP projection first")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("operator basis is linearly dependent")]
    SingularBasis,

    #[error("chi must be expressed in the normal basis; convert first")]
    NonNormalBasis,

    #[error("malformed affine map: first row must be (1, 0, 0, 0)")]
    MalformedAffine,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unphysical T1/T2: T2 = {t2} exceeds 2*T1 = {}", 2.0 * t1)]
    UnphysicalRelaxation { t1: f64, t2: f64 },

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
