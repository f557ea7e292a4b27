use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistorError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("jet order {available} is too small, {required} needed")]
    JetOrder { required: usize, available: usize },

    #[error("division by a jet with zero constant term")]
    ZeroDivisor,

    #[error("not a Hermitian structure: {0}")]
    NotHermitian(String),

    #[error("matrix is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),

    #[error("subspace is rank deficient")]
    RankDeficient,

    #[error("subspace is not isotropic (residual {0:e})")]
    NotIsotropic(f64),

    #[error("subspace meets its conjugate")]
    MeetsConjugate,

    #[error("matrix is not in m_J (residual {0:e})")]
    NotInMj(f64),

    #[error("structure lies outside the mu-chart")]
    OutsideChart,

    #[error("branch point: d phi vanishes")]
    BranchPoint,

    #[error("singular Jacobian (smallest singular value {0:e})")]
    SingularJacobian(f64),

    #[error("Newton iteration did not converge in {iterations} steps (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("accumulated group element is singular at step {0}")]
    NonInvertible(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = TwistorError> = std::result::Result<T, E>;
