use thiserror::Error;

/// Errors raised while validating states or evaluating entropies.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("trace deviates from 1 (trace = {0})")]
    TraceDeviation(f64),

    #[error("negative eigenvalue {0:e} below clamping window")]
    NegativeEigenvalue(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("projectors are not a complete orthogonal set (residual {0:e})")]
    IncompleteProjectorSet(f64),

    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("spectrum has a degenerate nonzero cluster (value {value}, multiplicity {multiplicity})")]
    DegenerateSpectrum { value: f64, multiplicity: usize },

    #[error("at least {required} samples required, got {found}")]
    InsufficientSamples { required: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
