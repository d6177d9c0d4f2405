//! Shared numerical primitives: sample moments, symmetric eigensolver,
//! matrix inverse square root, projection correlations, and ranks.
//!
//! Conventions used throughout the crate:
//! * covariances divide by `n`, not `n - 1`;
//! * eigenvalues come back sorted in descending order;
//! * near-singularity is an error — nothing is ridge-regularised silently.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::data::DataSet;
use crate::error::{Error, Result};

/// First and second sample moments of a data set.
///
/// All covariances use divisor `n`.
#[derive(Debug, Clone)]
pub struct MomentSet {
    /// Predictor mean, length `p`.
    pub mean: DVector<f64>,
    /// Predictor covariance `(1/n) Σ (x_i - x̄)(x_i - x̄)ᵀ`, `p x p`.
    pub cov: DMatrix<f64>,
    /// Predictor-response covariance `(1/n) Σ (x_i - x̄)(y_i - ȳ)`, length `p`.
    pub cov_xy: DVector<f64>,
    /// Response mean.
    pub y_mean: f64,
}

/// Computes [`MomentSet`] for a data set.
///
/// Finiteness is guaranteed by [`DataSet`] construction, so this cannot
/// observe NaNs. The covariance is assembled from centred columns, which
/// keeps it exactly symmetric.
pub fn sample_moments(data: &DataSet) -> MomentSet {
    let n = data.n();
    let nf = n as f64;
    let x = data.x();
    let y = data.y();

    let mean = x.row_mean().transpose();
    let y_mean = y.mean();

    let mut xc = x.clone();
    for j in 0..data.p() {
        let mj = mean[j];
        for i in 0..n {
            xc[(i, j)] -= mj;
        }
    }
    let yc = y.map(|v| v - y_mean);

    let cov = xc.transpose() * &xc / nf;
    let cov_xy = xc.transpose() * yc / nf;

    MomentSet {
        mean,
        cov,
        cov_xy,
        y_mean,
    }
}

/// Centres the columns of a matrix in place and returns the column means.
pub(crate) fn center_columns(m: &mut DMatrix<f64>) -> DVector<f64> {
    let means = m.row_mean().transpose();
    for j in 0..m.ncols() {
        let mj = means[j];
        for i in 0..m.nrows() {
            m[(i, j)] -= mj;
        }
    }
    means
}

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
///
/// The input is symmetrised as `(M + Mᵀ)/2` before decomposing, so tiny
/// asymmetries from accumulated rounding are harmless. Returns the
/// eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let sym = (m + m.transpose()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 100_000).ok_or(Error::NonConvergence)?;

    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });

    let mut values = DVector::zeros(d);
    let mut vectors = DMatrix::zeros(d, d);
    for (new, &old) in order.iter().enumerate() {
        values[new] = eig.eigenvalues[old];
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    Ok((values, vectors))
}

/// Relative eigenvalue floor below which a matrix is treated as singular.
const SINGULARITY_RATIO: f64 = 1e-10;

/// Inverse square root of a symmetric positive-definite matrix.
///
/// Computed spectrally: `R = V diag(λ^{-1/2}) Vᵀ`, so `R · R ≈ M⁻¹` and
/// `R` is symmetric. Fails with [`Error::SingularCovariance`] when the
/// smallest eigenvalue does not exceed `1e-10` times the largest.
pub fn inverse_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eigen(m)?;
    let largest = values[0];
    let smallest = values[values.len() - 1];
    if largest <= 0.0 || smallest <= SINGULARITY_RATIO * largest {
        return Err(Error::SingularCovariance);
    }

    let inv_roots = values.map(|l| 1.0 / l.sqrt());
    let mut r = DMatrix::zeros(m.nrows(), m.ncols());
    for k in 0..values.len() {
        let u = vectors.column(k);
        let w = inv_roots[k];
        // Accumulate w * u uᵀ; the loop writes both triangles from the
        // same product so the result stays exactly symmetric.
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                let add = w * u[i] * u[j];
                r[(i, j)] += add;
                if i != j {
                    r[(j, i)] = r[(i, j)];
                }
            }
        }
    }
    Ok(r)
}

/// Threshold scale below which a projected sample counts as constant.
const DEGENERATE_SD: f64 = 1e-14;

/// Squared sample correlation between the projections `X b_true` and
/// `X b_hat`.
///
/// This is the agreement score used to compare an estimated direction
/// with a known one: invariant to scaling and sign of either vector.
/// Fails with [`Error::DegenerateProjection`] when either projection is
/// constant (zero variance up to rounding).
pub fn squared_projection_correlation(
    x: &DMatrix<f64>,
    b_true: &DVector<f64>,
    b_hat: &DVector<f64>,
) -> Result<f64> {
    if b_true.len() != x.ncols() || b_hat.len() != x.ncols() {
        return Err(Error::InvalidInput(format!(
            "direction lengths {} and {} do not match {} predictors",
            b_true.len(),
            b_hat.len(),
            x.ncols()
        )));
    }
    let a = x * b_true;
    let b = x * b_hat;
    squared_correlation(&a, &b)
}

/// Squared sample correlation between two aligned scalar samples.
pub(crate) fn squared_correlation(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    let n = a.len();
    if n != b.len() || n < 2 {
        return Err(Error::InvalidInput(
            "correlation needs two aligned samples of length >= 2".into(),
        ));
    }
    let am = a.mean();
    let bm = b.mean();
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for i in 0..n {
        let da = a[i] - am;
        let db = b[i] - bm;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    let scale_a = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let scale_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if (saa / n as f64).sqrt() <= DEGENERATE_SD * scale_a
        || (sbb / n as f64).sqrt() <= DEGENERATE_SD * scale_b
    {
        return Err(Error::DegenerateProjection);
    }
    Ok((sab * sab / (saa * sbb)).clamp(0.0, 1.0))
}

/// Sample canonical correlations between two blocks of columns observed
/// on the same `n` cases.
///
/// Both blocks are centred; each is whitened with the inverse square
/// root of its own covariance; the canonical correlations are the
/// singular values of the whitened cross-covariance, obtained here as
/// square roots of eigenvalues of its Gram matrix. Returned in
/// descending order, clipped to `[0, 1]`.
///
/// Requires `n > k_a + k_b` and full column rank in both blocks after
/// centring ([`Error::SingularCovariance`] otherwise).
pub fn canonical_correlations(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    let (ka, kb) = (a.ncols(), b.ncols());
    if n != b.nrows() {
        return Err(Error::InvalidInput(format!(
            "blocks observe {} and {} cases",
            n,
            b.nrows()
        )));
    }
    if ka == 0 || kb == 0 {
        return Err(Error::InvalidInput("empty block".into()));
    }
    if n <= ka + kb {
        return Err(Error::InvalidInput(format!(
            "need more than {} cases for blocks of {} and {} columns, got {}",
            ka + kb,
            ka,
            kb,
            n
        )));
    }
    if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let nf = n as f64;
    let mut ac = a.clone_owned();
    let mut bc = b.clone_owned();
    center_columns(&mut ac);
    center_columns(&mut bc);

    let saa = ac.transpose() * &ac / nf;
    let sbb = bc.transpose() * &bc / nf;
    let sab = ac.transpose() * &bc / nf;

    let wa = inverse_sqrt(&saa)?;
    let wb = inverse_sqrt(&sbb)?;
    let k = wa * sab * wb;

    // Squared canonical correlations are the eigenvalues of the smaller
    // Gram matrix of the whitened cross-covariance.
    let gram = if ka <= kb {
        &k * k.transpose()
    } else {
        k.transpose() * &k
    };
    let (values, _) = sym_eigen(&gram)?;
    Ok(values
        .iter()
        .take(ka.min(kb))
        .map(|&l| l.clamp(0.0, 1.0).sqrt())
        .collect())
}

/// Ranks of a sample, averaging over ties.
///
/// Ranks are 1-based: the smallest value gets rank 1, and a group of
/// equal values all receive the mean of the positions they occupy.
pub fn ranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite values compare")
            .then(a.cmp(&b))
    });

    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end (1-based) share the averaged rank.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            out[idx] = avg;
        }
        start = end;
    }
    Ok(out)
}
