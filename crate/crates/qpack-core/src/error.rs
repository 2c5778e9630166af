use alloc::string::String;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An inverse-design problem has no solution inside the search bracket.
    #[error("no solution: {0}")]
    NoSolution(String),
    /// Two networks cannot be combined (different grids or reference impedances).
    #[error("incompatible networks: {0}")]
    Incompatible(String),
    /// A fit could not be started or produced no usable result.
    #[error("fit failed: {0}")]
    FitFailure(String),
    /// No time in the scan window reached the contrast threshold.
    #[error("calibration failed: best contrast {best_contrast:.4} at {best_time:e} s")]
    CalibrationFailure { best_time: f64, best_contrast: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(alloc::format!($($arg)*))
    };
}
pub(crate) use domain;
