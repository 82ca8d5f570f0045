use thiserror::Error;

/// Errors raised by the library. Cap-related variants map to the CLI's
/// "inconclusive" exit status.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SrsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter is not reduced (r_0 = 0)")]
    NotReduced,
    #[error("parameter is not in the interior of D_d (spectral radius >= 1)")]
    NotContractive,
    #[error("undecidable at precision cap: {0}")]
    PrecisionCap(String),
    #[error("step cap of {0} iterations reached")]
    StepCap(u64),
    #[error("point cap of {0} points reached")]
    PointCap(usize),
    #[error("not a Pisot polynomial: {0}")]
    NotPisot(String),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("not an element of Z[beta] ∩ [0,1): {0}")]
    NotBetaPoint(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl SrsError {
    /// True for errors that mean "a resource cap was hit", as opposed to bad input.
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            SrsError::PrecisionCap(_) | SrsError::StepCap(_) | SrsError::PointCap(_)
        )
    }
}

impl From<std::io::Error> for SrsError {
    fn from(e: std::io::Error) -> Self {
        SrsError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SrsError>;
