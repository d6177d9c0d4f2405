//! Linear regression fits: ordinary least squares and a Huber-weighted
//! iteratively reweighted variant.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numerics::sample_moments;

/// Default Huber tuning constant (95% efficiency under Gaussian errors).
pub const DEFAULT_HUBER_TUNING: f64 = 1.345;

/// Default iteration cap for the reweighted fit.
pub const DEFAULT_HUBER_MAX_ITER: usize = 50;

/// Default coefficient-change tolerance for the reweighted fit.
pub const DEFAULT_HUBER_TOL: f64 = 1e-8;

/// Consistency factor turning a median absolute deviation into a
/// Gaussian-comparable scale.
const MAD_FACTOR: f64 = 1.4826;

/// Outcome of a linear fit with intercept.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Intercept estimate.
    pub intercept: f64,
    /// Slope estimates, one per predictor.
    pub slope: DVector<f64>,
    /// Residuals `y_i - intercept - slopeᵀ x_i`, aligned with the rows
    /// of the data the fit was computed on.
    pub residuals: DVector<f64>,
    /// Hat-matrix diagonal of the intercept-augmented design; entries in
    /// `[0, 1]` and summing to `p + 1`. Reported for the unweighted
    /// design in every fit, including the reweighted one.
    pub leverage: DVector<f64>,
    /// Residual scale: root mean squared error `√(RSS / (n - p - 1))`
    /// for least squares, the rescaled median absolute deviation for the
    /// Huber fit.
    pub scale: f64,
}

impl FitResult {
    /// Fitted values for the rows the fit was computed on.
    pub fn fitted(&self, data: &DataSet) -> DVector<f64> {
        data.x() * &self.slope + DVector::from_element(data.n(), self.intercept)
    }
}

fn require_enough_rows(data: &DataSet) -> Result<()> {
    if data.n() <= data.p() + 1 {
        return Err(Error::InvalidInput(format!(
            "need more than p + 1 = {} observations, got {}",
            data.p() + 1,
            data.n()
        )));
    }
    Ok(())
}

/// Hat-matrix diagonal `h_i = 1/n + (x_i - x̄)ᵀ (n S_x)⁻¹ (x_i - x̄)`.
fn hat_diagonal(data: &DataSet, mean: &DVector<f64>, cov_inv: &DMatrix<f64>) -> DVector<f64> {
    let n = data.n();
    let nf = n as f64;
    let mut h = DVector::zeros(n);
    for i in 0..n {
        let c = data.row(i) - mean;
        h[i] = 1.0 / nf + (c.transpose() * cov_inv * &c)[(0, 0)] / nf;
    }
    h
}

/// Ordinary least squares of the response on the predictors, with
/// intercept.
///
/// The slope solves `S_x b = S_xy` on divisor-`n` moments; the intercept
/// is `ȳ - bᵀ x̄`. Fails with [`Error::SingularCovariance`] when the
/// predictor covariance has no Cholesky factor (collinear columns) and
/// with [`Error::InvalidInput`] when `n <= p + 1`.
pub fn ols_fit(data: &DataSet) -> Result<FitResult> {
    require_enough_rows(data)?;
    let m = sample_moments(data);
    let chol = Cholesky::new(m.cov.clone()).ok_or(Error::SingularCovariance)?;
    let slope = chol.solve(&m.cov_xy);
    let intercept = m.y_mean - slope.dot(&m.mean);

    let fitted = data.x() * &slope + DVector::from_element(data.n(), intercept);
    let residuals = data.y() - fitted;
    let dof = (data.n() - data.p() - 1) as f64;
    let scale = (residuals.norm_squared() / dof).sqrt();
    let leverage = hat_diagonal(data, &m.mean, &chol.inverse());

    Ok(FitResult {
        intercept,
        slope,
        residuals,
        leverage,
        scale,
    })
}

/// Median of a sample (mean of the middle pair for even lengths).
fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Rescaled median absolute deviation of a sample.
fn mad_scale(values: &DVector<f64>) -> f64 {
    let med = median(values.as_slice());
    let deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    MAD_FACTOR * median(&deviations)
}

/// Solves the weighted normal equations of the intercept-augmented
/// design: `(Σ w_i a_i a_iᵀ) c = Σ w_i a_i y_i` with `a_i = (1, x_i)`.
fn weighted_solve(data: &DataSet, weights: &DVector<f64>) -> Result<DVector<f64>> {
    let n = data.n();
    let p = data.p();
    let d = p + 1;
    let mut m = DMatrix::zeros(d, d);
    let mut rhs = DVector::zeros(d);
    let mut a = DVector::zeros(d);
    for i in 0..n {
        let w = weights[i];
        a[0] = 1.0;
        for j in 0..p {
            a[j + 1] = data.x()[(i, j)];
        }
        for r in 0..d {
            let wa = w * a[r];
            rhs[r] += wa * data.y()[i];
            for c in r..d {
                m[(r, c)] += wa * a[c];
            }
        }
    }
    for r in 0..d {
        for c in (r + 1)..d {
            m[(c, r)] = m[(r, c)];
        }
    }
    let chol = Cholesky::new(m).ok_or(Error::SingularCovariance)?;
    Ok(chol.solve(&rhs))
}

/// Huber M-estimation by iteratively reweighted least squares.
///
/// Starts at the least-squares fit. Each pass re-estimates the residual
/// scale as the rescaled median absolute deviation, computes weights
/// `w_i = min(1, tuning · scale / |r_i|)` (one when `r_i = 0`), and
/// solves the weighted normal equations. Stops when the largest
/// coefficient change falls below `tol`, when the scale degenerates to
/// zero (near-exact fit: the current coefficients are returned), or
/// after `max_iter` passes, whichever comes first.
pub fn huber_m_fit(data: &DataSet, tuning: f64, max_iter: usize, tol: f64) -> Result<FitResult> {
    if tuning <= 0.0 {
        return Err(Error::InvalidInput("tuning constant must be positive".into()));
    }
    require_enough_rows(data)?;

    let start = ols_fit(data)?;
    let n = data.n();
    let p = data.p();
    let mut coef = DVector::zeros(p + 1);
    coef[0] = start.intercept;
    coef.rows_mut(1, p).copy_from(&start.slope);

    let residuals_for = |c: &DVector<f64>| -> DVector<f64> {
        let slope = c.rows(1, p).clone_owned();
        let fitted = data.x() * slope + DVector::from_element(n, c[0]);
        data.y() - fitted
    };

    for _ in 0..max_iter {
        let r = residuals_for(&coef);
        let scale = mad_scale(&r);
        if scale == 0.0 {
            // Residuals are essentially exact; nothing left to reweight.
            break;
        }
        let threshold = tuning * scale;
        let weights = DVector::from_iterator(
            n,
            r.iter().map(|&ri| {
                if ri == 0.0 {
                    1.0
                } else {
                    (threshold / ri.abs()).min(1.0)
                }
            }),
        );
        let next = weighted_solve(data, &weights)?;
        let delta = (&next - &coef).amax();
        coef = next;
        if delta < tol {
            break;
        }
    }

    let residuals = residuals_for(&coef);
    let scale = mad_scale(&residuals);
    Ok(FitResult {
        intercept: coef[0],
        slope: coef.rows(1, p).clone_owned(),
        residuals,
        leverage: start.leverage,
        scale,
    })
}

/// A choice of robust or plain base regression, used where a pipeline
/// needs a fit it can swap between flavours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseRegressor {
    /// Ordinary least squares.
    Ols,
    /// Huber M-estimation with the given tuning constant.
    Huber { tuning: f64 },
}

impl BaseRegressor {
    /// Runs the base fit.
    pub fn fit(&self, data: &DataSet) -> Result<FitResult> {
        match *self {
            BaseRegressor::Ols => ols_fit(data),
            BaseRegressor::Huber { tuning } => {
                huber_m_fit(data, tuning, DEFAULT_HUBER_MAX_ITER, DEFAULT_HUBER_TOL)
            }
        }
    }
}

/// A regression recipe: plain, robust, or influence-trimmed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regressor {
    /// Ordinary least squares.
    Ols,
    /// Huber M-estimation with the given tuning constant.
    Huber { tuning: f64 },
    /// Fit `base`, drop the given fraction of observations with the
    /// largest influence, refit `base` on the remainder.
    Trimmed { fraction: f64, base: BaseRegressor },
}

impl Regressor {
    /// Huber with the default tuning constant.
    pub fn huber() -> Self {
        Regressor::Huber {
            tuning: DEFAULT_HUBER_TUNING,
        }
    }

    /// Influence-trimmed least squares with the default fraction.
    pub fn trimmed() -> Self {
        Regressor::Trimmed {
            fraction: super::influence::DEFAULT_TRIM_FRACTION,
            base: BaseRegressor::Ols,
        }
    }

    /// Runs the configured fit.
    pub fn fit(&self, data: &DataSet) -> Result<FitResult> {
        match *self {
            Regressor::Ols => ols_fit(data),
            Regressor::Huber { tuning } => {
                huber_m_fit(data, tuning, DEFAULT_HUBER_MAX_ITER, DEFAULT_HUBER_TOL)
            }
            Regressor::Trimmed { fraction, base } => {
                super::influence::trimmed_fit(data, fraction, base)
            }
        }
    }
}
