//! Influence diagnostics and influence-trimmed refitting.

use nalgebra::{DMatrix, DVector};

use crate::data::DataSet;
use crate::error::{Error, Result};

use super::regression::{BaseRegressor, FitResult};

/// Default fraction of observations dropped by [`trimmed_fit`].
pub const DEFAULT_TRIM_FRACTION: f64 = 0.10;

/// Cook's distance for every observation of a fit:
/// `D_i = (r_i² / (p_params · scale²)) · (h_i / (1 - h_i)²)`.
///
/// `p_params` counts the fitted parameters (slopes plus intercept).
/// Requires a positive residual scale; fails with [`Error::LeverageOne`]
/// when an observation's leverage reaches one, since the formula then
/// divides by zero.
pub fn cooks_distance(fit: &FitResult, p_params: usize) -> Result<DVector<f64>> {
    if fit.scale <= 0.0 {
        return Err(Error::InvalidInput(
            "influence needs a positive residual scale".into(),
        ));
    }
    if p_params == 0 {
        return Err(Error::InvalidInput("parameter count must be positive".into()));
    }
    let n = fit.residuals.len();
    let mut d = DVector::zeros(n);
    let denom = p_params as f64 * fit.scale * fit.scale;
    for i in 0..n {
        let h = fit.leverage[i];
        if h >= 1.0 - 1e-12 {
            return Err(Error::LeverageOne { index: i });
        }
        let r = fit.residuals[i];
        d[i] = (r * r / denom) * (h / ((1.0 - h) * (1.0 - h)));
    }
    Ok(d)
}

/// Fits, drops the `floor(fraction · n)` observations with the largest
/// Cook's distance, and refits on the remainder.
///
/// Ties at the cut are resolved by keeping the lower index. The returned
/// fit describes the kept subset: its residuals and leverage are aligned
/// with the surviving rows in their original relative order. Requires
/// `0 <= fraction < 0.5` and enough survivors for the base fit.
pub fn trimmed_fit(data: &DataSet, fraction: f64, base: BaseRegressor) -> Result<FitResult> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(Error::InvalidInput(format!(
            "trim fraction must lie in [0, 0.5), got {fraction}"
        )));
    }
    let n = data.n();
    let drop = (fraction * n as f64).floor() as usize;
    if n - drop <= data.p() + 1 {
        return Err(Error::InvalidInput(format!(
            "trimming {drop} of {n} rows leaves too few for {} predictors",
            data.p()
        )));
    }

    let full = base.fit(data)?;
    if drop == 0 {
        return Ok(full);
    }
    let d = cooks_distance(&full, data.p() + 1)?;

    // Ascending by distance, ties ascending by index; the tail of this
    // ordering is dropped, so tied observations lose their higher-index
    // members first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        d[a].partial_cmp(&d[b])
            .expect("distances are finite")
            .then(a.cmp(&b))
    });
    let mut dropped = vec![false; n];
    for &i in &order[n - drop..] {
        dropped[i] = true;
    }

    let keep: Vec<usize> = (0..n).filter(|&i| !dropped[i]).collect();
    let mut x = DMatrix::zeros(keep.len(), data.p());
    let mut y = DVector::zeros(keep.len());
    for (row, &i) in keep.iter().enumerate() {
        for j in 0..data.p() {
            x[(row, j)] = data.x()[(i, j)];
        }
        y[row] = data.y()[i];
    }
    let kept = DataSet::new(y, x)?;
    base.fit(&kept)
}
