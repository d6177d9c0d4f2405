//! Quadratic summary regression on estimated projections: the model
//! `y ~ 1 + u_1 + … + u_k + u_1² + … + u_k²` with coefficient
//! inference, used to describe a fitted low-dimensional structure.

use crate::error::{Error, Result};

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// One estimated term of the quadratic summary model.
#[derive(Debug, Clone)]
pub struct TermStat {
    /// Term name: `intercept`, `u1`, …, `u1^2`, ….
    pub name: String,
    /// Coefficient estimate.
    pub estimate: f64,
    /// Standard error of the estimate.
    pub std_error: f64,
    /// t statistic (estimate / standard error).
    pub t_value: f64,
    /// Two-sided p-value under the t distribution with the residual
    /// degrees of freedom.
    pub p_value: f64,
}

/// Fitted quadratic summary model.
#[derive(Debug, Clone)]
pub struct QuadraticFit {
    /// Intercept, linear, and squared terms in order.
    pub terms: Vec<TermStat>,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// Fitted values.
    pub fitted: DVector<f64>,
    /// Residuals (observed minus fitted).
    pub residuals: DVector<f64>,
}

/// Fits `y` on an intercept, the projection columns, and their squares.
///
/// Requires more observations than terms (n > 2k+1) and a full-rank
/// design; collinear projections surface as [`Error::SingularCovariance`].
pub fn quadratic_fit(y: &DVector<f64>, projections: &DMatrix<f64>) -> Result<QuadraticFit> {
    let n = projections.nrows();
    let k = projections.ncols();
    if k == 0 {
        return Err(Error::InvalidInput("no projection columns given".into()));
    }
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "response has {} entries but projections have {n} rows",
            y.len()
        )));
    }
    let terms = 2 * k + 1;
    if n <= terms {
        return Err(Error::InvalidInput(format!(
            "need more than {terms} observations for {k} projection(s), got {n}"
        )));
    }

    let mut z = DMatrix::zeros(n, terms);
    for i in 0..n {
        z[(i, 0)] = 1.0;
        for j in 0..k {
            let u = projections[(i, j)];
            z[(i, 1 + j)] = u;
            z[(i, 1 + k + j)] = u * u;
        }
    }

    let ztz = z.transpose() * &z;
    let zty = z.transpose() * y;
    let chol = ztz
        .clone()
        .cholesky()
        .ok_or(Error::SingularCovariance)?;
    let coef = chol.solve(&zty);
    let fitted = &z * &coef;
    let residuals = y - &fitted;

    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let y_mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    if tss <= 0.0 {
        return Err(Error::DegenerateProjection);
    }
    let df = (n - terms) as f64;
    let sigma2 = rss / df;
    let cov = chol.inverse() * sigma2;

    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidInput(format!("t distribution: {e}")))?;
    let mut names = vec!["intercept".to_string()];
    for j in 1..=k {
        names.push(format!("u{j}"));
    }
    for j in 1..=k {
        names.push(format!("u{j}^2"));
    }
    let terms = names
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = coef[j];
            let std_error = cov[(j, j)].max(0.0).sqrt();
            let t_value = if std_error > 0.0 {
                estimate / std_error
            } else {
                f64::INFINITY
            };
            let p_value = 2.0 * (1.0 - dist.cdf(t_value.abs()));
            TermStat {
                name,
                estimate,
                std_error,
                t_value,
                p_value,
            }
        })
        .collect();

    Ok(QuadraticFit {
        terms,
        r_squared: 1.0 - rss / tss,
        fitted,
        residuals,
    })
}
