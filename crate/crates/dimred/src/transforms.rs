//! Symmetry-breaking folds of the response or the predictors.
//!
//! A regression whose link is even in `βᵀx` defeats every estimator
//! built on `Cov(x, Y)`-style moments, because the covariance cancels
//! across the two halves of the projection. The folds here break that
//! cancellation: pick a direction `v`, split observations by which side
//! of the mean their projection `vᵀx` falls on, and either reflect the
//! response about its local level at the centre (response fold) or
//! reflect the centred predictors themselves (predictor fold). Either
//! way a plain regression on the folded data sees a monotone signal.

use nalgebra::{DMatrix, DVector};

use crate::data::{DataSet, Direction};
use crate::error::{Error, Result};
use crate::estimators::Regressor;
use crate::numerics::sample_moments;

/// Default neighbourhood size for the local response level.
pub const DEFAULT_NEIGHBORHOOD: usize = 10;

/// Everything a fold needs: the direction, the projected centre, and the
/// local response level at that centre.
#[derive(Debug, Clone)]
pub struct TransformContext {
    /// Splitting direction.
    pub direction: Direction,
    /// Projection of the predictor mean, `vᵀ x̄`.
    pub center: f64,
    /// Mean response over the `m` observations whose projections sit
    /// closest to the centre.
    pub local_mean: f64,
    /// Neighbourhood size used for `local_mean`.
    pub m: usize,
}

/// Estimates the response level where `vᵀx` crosses the projected mean.
///
/// Takes the `m` observations with the smallest `|vᵀx_i - vᵀx̄|`
/// (distance ties keep the lower index) and averages their responses.
/// Requires `1 <= m <= n`.
pub fn local_mean_at_center(
    data: &DataSet,
    direction: &Direction,
    m: usize,
) -> Result<TransformContext> {
    let n = data.n();
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!(
            "neighbourhood size must lie in 1..={n}, got {m}"
        )));
    }
    if direction.len() != data.p() {
        return Err(Error::InvalidInput(format!(
            "direction length {} does not match {} predictors",
            direction.len(),
            data.p()
        )));
    }

    let proj = direction.project(data.x());
    let mean = data.x().row_mean().transpose();
    let center = direction.as_vector().dot(&mean);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let da = (proj[a] - center).abs();
        let db = (proj[b] - center).abs();
        da.partial_cmp(&db).expect("finite projections").then(a.cmp(&b))
    });
    let local_mean = order[..m].iter().map(|&i| data.y()[i]).sum::<f64>() / m as f64;

    Ok(TransformContext {
        direction: direction.clone(),
        center,
        local_mean,
        m,
    })
}

/// Response fold: observations on the non-positive side of the split
/// are reflected about the local response level.
///
/// `y_i` stays put when `vᵀx_i > vᵀx̄`; otherwise it becomes
/// `2 · local_mean - y_i`. Applying the same context twice returns the
/// original responses (the fold is an involution).
pub fn transform_response(data: &DataSet, ctx: &TransformContext) -> DVector<f64> {
    let proj = ctx.direction.project(data.x());
    DVector::from_fn(data.n(), |i, _| {
        if proj[i] > ctx.center {
            data.y()[i]
        } else {
            2.0 * ctx.local_mean - data.y()[i]
        }
    })
}

/// Predictor fold: centred predictor rows on the non-positive side of
/// the split are negated.
///
/// Row `i` becomes `s_i (x_i - x̄)` with `s_i = sign(vᵀx_i - vᵀx̄)` and
/// `sign(0) = -1`, matching the side assignment of the response fold.
pub fn transform_predictors(data: &DataSet, ctx: &TransformContext) -> DMatrix<f64> {
    let proj = ctx.direction.project(data.x());
    let mean = data.x().row_mean().transpose();
    let n = data.n();
    let p = data.p();
    let mut out = DMatrix::zeros(n, p);
    for i in 0..n {
        let s = if proj[i] > ctx.center { 1.0 } else { -1.0 };
        for j in 0..p {
            out[(i, j)] = s * (data.x()[(i, j)] - mean[j]);
        }
    }
    out
}

/// Fold the response along `v`, then regress the folded response on the
/// original predictors; the fitted slope, normalised, is the estimate.
pub fn method1(
    data: &DataSet,
    direction: &Direction,
    regressor: Regressor,
    m: usize,
) -> Result<Direction> {
    method1_fit(data, direction, regressor, m).map(|(d, _)| d)
}

/// [`method1`] that also exposes the slope norm of the underlying fit.
pub(crate) fn method1_fit(
    data: &DataSet,
    direction: &Direction,
    regressor: Regressor,
    m: usize,
) -> Result<(Direction, f64)> {
    let ctx = local_mean_at_center(data, direction, m)?;
    let folded = data.with_response(transform_response(data, &ctx))?;
    let fit = regressor.fit(&folded)?;
    let norm = fit.slope.norm();
    Ok((Direction::from_slope(fit.slope)?, norm))
}

/// Fold the predictors along `v`, then regress the original response on
/// the folded predictors; the fitted slope, normalised, is the estimate.
pub fn method2(
    data: &DataSet,
    direction: &Direction,
    regressor: Regressor,
    m: usize,
) -> Result<Direction> {
    method2_fit(data, direction, regressor, m).map(|(d, _)| d)
}

/// [`method2`] that also exposes the slope norm of the underlying fit.
pub(crate) fn method2_fit(
    data: &DataSet,
    direction: &Direction,
    regressor: Regressor,
    m: usize,
) -> Result<(Direction, f64)> {
    let ctx = local_mean_at_center(data, direction, m)?;
    let folded = data.with_predictors(transform_predictors(data, &ctx))?;
    let fit = regressor.fit(&folded)?;
    let norm = fit.slope.norm();
    Ok((Direction::from_slope(fit.slope)?, norm))
}

/// Predictor-fold estimate that keeps the original predictor covariance:
/// the slope solves `S_x b = Cov(x*, y)` instead of refitting on the
/// folded covariance. Valid for the same population targets; exposed for
/// comparison with [`method2`].
pub fn method2_original_cov(data: &DataSet, direction: &Direction, m: usize) -> Result<Direction> {
    let ctx = local_mean_at_center(data, direction, m)?;
    let folded = data.with_predictors(transform_predictors(data, &ctx))?;

    let base = sample_moments(data);
    let fold_moments = sample_moments(&folded);
    let chol =
        nalgebra::Cholesky::new(base.cov.clone()).ok_or(Error::SingularCovariance)?;
    let slope = chol.solve(&fold_moments.cov_xy);
    Direction::from_slope(slope)
}
