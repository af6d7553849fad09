use thiserror::Error;

/// Errors surfaced by the solver, conditioning, sampling and closed-form layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix polynomial is malformed: {0}")]
    BadPolynomial(String),

    #[error("coefficient transform is numerically singular (|det| = {det:.3e}, scale = {scale:.3e})")]
    SingularTransform { det: f64, scale: f64 },

    #[error("determinant form degree {degree} exceeds the interpolation budget of {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("binary form vanishes identically at working precision")]
    DegenerateForm,

    #[error("Sturm remainder collapsed below the pruning threshold; root count is inconclusive")]
    InconclusiveChain,

    #[error("point is not an eigenvalue: smallest singular value {sigma_min:.3e} exceeds {tol:.3e}")]
    NotAnEigenvalue { sigma_min: f64, tol: f64 },

    #[error("finite-difference root tracking lost its pairing (step moved the root by {delta:.3e} rad)")]
    RootTrackingLost { delta: f64 },

    #[error("subspace basis is not Frobenius-orthonormal (max deviation {deviation:.3e})")]
    BadBasis { deviation: f64 },

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("estimator input is empty")]
    EmptyInput,

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
