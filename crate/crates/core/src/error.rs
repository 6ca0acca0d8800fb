use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count must be at least 1")]
    NoModes,
    #[error("squeezing parameter must be finite and non-negative, got {0}")]
    InvalidSqueezing(f64),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },
    #[error("mode indices must be distinct")]
    RepeatedMode,
    #[error("moment table is not physical: {0}")]
    InvalidTable(String),
    #[error("degenerate inference: conditioning variance {0} is not positive")]
    DegenerateInference(f64),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("{branch} branch requested but pump ratio is {ratio}")]
    BranchMismatch { branch: &'static str, ratio: f64 },
    #[error("spectral inputs are not on a common frequency grid")]
    GridMismatch,
    #[error("linearized drift is singular at omega = {omega} (pump at threshold)")]
    SingularDrift { omega: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("all {0} trajectories diverged")]
    AllDiverged(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason: "must be finite and positive" })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason: "must be finite and non-negative" })
    }
}
