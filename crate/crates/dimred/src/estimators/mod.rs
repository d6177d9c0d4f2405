//! Direction estimators: regression slopes, residual-curvature
//! directions, slice-moment methods, and cumulative-indicator methods.

mod cumulative;
mod influence;
mod phd;
mod quadratic;
mod regression;
mod slicing;

pub use cumulative::{cume, cuve};
pub use influence::{cooks_distance, trimmed_fit, DEFAULT_TRIM_FRACTION};
pub use phd::phd_directions;
pub use quadratic::{quadratic_fit, QuadraticFit, TermStat};
pub use regression::{
    huber_m_fit, ols_fit, BaseRegressor, FitResult, Regressor, DEFAULT_HUBER_MAX_ITER,
    DEFAULT_HUBER_TOL, DEFAULT_HUBER_TUNING,
};
pub use slicing::{
    default_slice_count, save_est, sir, slice, slice_covariances, slice_means, SliceAssignment,
};
