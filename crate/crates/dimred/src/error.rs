//! Error type shared across the crate.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes surfaced by the numerical routines and the I/O layer.
///
/// Every variant renders as a single line so command-line consumers can
/// forward errors verbatim as one diagnostic.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A NaN or infinity was found where finite input is required.
    #[error("non-finite value in input")]
    NonFinite,

    /// An iterative decomposition or fit failed to converge.
    #[error("iteration limit reached without convergence")]
    NonConvergence,

    /// A covariance matrix was singular or numerically close to it.
    /// Signals collinear predictors; nothing is regularised silently.
    #[error("singular covariance matrix (collinear or constant columns)")]
    SingularCovariance,

    /// A projected sample had zero variance, so a correlation with it
    /// is undefined.
    #[error("degenerate projection: projected values have zero variance")]
    DegenerateProjection,

    /// A slice held fewer observations than the estimator needs.
    #[error("slice {slice} has {count} observation(s); at least {required} required")]
    SliceTooSmall {
        slice: usize,
        count: usize,
        required: usize,
    },

    /// A leverage value at or above one makes the influence formula blow up.
    #[error("observation {index} has leverage at or above one")]
    LeverageOne { index: usize },

    /// A slope vector had near-zero norm and cannot define a direction.
    #[error("slope vector has norm below 1e-12; no direction defined")]
    ZeroSlope,

    /// A precondition on arguments was violated (sizes, ranges, flags).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A cell in a CSV file failed to parse as a finite number.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A data source contained no observations.
    #[error("empty data: no observations found")]
    EmptyData,

    /// An underlying filesystem operation failed.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV encoding or decoding failed below the cell level.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
