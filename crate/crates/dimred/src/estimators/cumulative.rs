//! Cumulative-indicator estimators: slicing-free analogues of the
//! slice-moment methods built from `1{y_i <= y_j}` indicators.

use nalgebra::{DMatrix, DVector};

use crate::data::{DataSet, Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::numerics::{inverse_sqrt, sample_moments, sym_eigen};

fn check_direction_count(p: usize, directions: usize) -> Result<()> {
    if directions == 0 || directions > p {
        return Err(Error::InvalidInput(format!(
            "direction count must lie in 1..={p}, got {directions}"
        )));
    }
    Ok(())
}

/// Whitened, centred predictor rows `z_i = S_x^{-1/2} (x_i - x̄)` along
/// with the whitener, plus the observation order sorted by ascending
/// response (ties by index).
fn whitened_setup(data: &DataSet) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<usize>)> {
    let m = sample_moments(data);
    let w = inverse_sqrt(&m.cov)?;
    let n = data.n();
    let p = data.p();

    let mut centred = data.x().clone();
    for j in 0..p {
        let mj = m.mean[j];
        for i in 0..n {
            centred[(i, j)] -= mj;
        }
    }
    let z = centred * &w; // rows are z_iᵀ since the whitener is symmetric

    let y = data.y();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        y[a].partial_cmp(&y[b])
            .expect("finite responses")
            .then(a.cmp(&b))
    });
    Ok((z, w, order))
}

/// Boundaries `(start, end)` of tied-response runs within `order`.
///
/// Every member of a tied group shares the same indicator prefix (all
/// tied values count as `<=` each other), so accumulation can cover a
/// whole group before its terms are emitted once with weight equal to
/// the group size.
fn tie_groups(y: &DVector<f64>, order: &[usize]) -> Vec<(usize, usize)> {
    let n = order.len();
    let mut groups = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y[order[end]] == y[order[start]] {
            end += 1;
        }
        groups.push((start, end));
        start = end;
    }
    groups
}

/// Cumulative mean estimator.
///
/// For each observed response level `y_j`, form the indicator-weighted
/// mean `m̂(y_j) = (1/n) Σ_i z_i 1{y_i <= y_j}` of the whitened
/// predictors, then eigendecompose the kernel
/// `(1/n) Σ_j m̂(y_j) m̂(y_j)ᵀ`. Directions are the leading eigenvectors
/// mapped back through the whitener; weights are the eigenvalues.
pub fn cume(data: &DataSet, directions: usize) -> Result<DirectionSet> {
    let p = data.p();
    check_direction_count(p, directions)?;
    let (z, w, order) = whitened_setup(data)?;
    let n = data.n();
    let nf = n as f64;

    let mut prefix = DVector::<f64>::zeros(p);
    let mut kernel = DMatrix::<f64>::zeros(p, p);
    for (start, end) in tie_groups(data.y(), &order) {
        for &idx in &order[start..end] {
            for j in 0..p {
                prefix[j] += z[(idx, j)];
            }
        }
        let g = (end - start) as f64;
        // kernel += g * (prefix/n)(prefix/n)ᵀ, symmetric by entry.
        for a in 0..p {
            let pa = g * prefix[a] / (nf * nf);
            for b in a..p {
                kernel[(a, b)] += pa * prefix[b];
            }
        }
    }
    for a in 0..p {
        for b in (a + 1)..p {
            kernel[(b, a)] = kernel[(a, b)];
        }
    }
    kernel /= nf;

    spectral_from_whitened(&kernel, &w, directions)
}

/// Cumulative variance estimator.
///
/// For each level `y_j` with empirical cumulative proportion `F̂(y_j)`,
/// form the indicator-restricted variance
/// `V̂(y_j) = (1/n) Σ_i z_i z_iᵀ 1{y_i <= y_j} - m̂(y_j) m̂(y_j)ᵀ` and
/// eigendecompose `(1/n) Σ_j (F̂(y_j) I - V̂(y_j))²`. This targets
/// second-moment (variance-expressed) structure the cumulative mean
/// misses, without choosing a slice count.
pub fn cuve(data: &DataSet, directions: usize) -> Result<DirectionSet> {
    let p = data.p();
    check_direction_count(p, directions)?;
    let (z, w, order) = whitened_setup(data)?;
    let n = data.n();
    let nf = n as f64;

    let mut prefix = DVector::<f64>::zeros(p);
    let mut prefix_outer = DMatrix::<f64>::zeros(p, p);
    let mut dev = DMatrix::<f64>::zeros(p, p);
    let mut dev_sq = DMatrix::<f64>::zeros(p, p);
    let mut kernel = DMatrix::<f64>::zeros(p, p);
    let mut zrow = DVector::<f64>::zeros(p);

    for (start, end) in tie_groups(data.y(), &order) {
        for &idx in &order[start..end] {
            for j in 0..p {
                zrow[j] = z[(idx, j)];
            }
            prefix += &zrow;
            // prefix_outer += z zᵀ; entries z[a]·z[b] are symmetric bit
            // for bit.
            for a in 0..p {
                for b in a..p {
                    let add = zrow[a] * zrow[b];
                    prefix_outer[(a, b)] += add;
                    if a != b {
                        prefix_outer[(b, a)] = prefix_outer[(a, b)];
                    }
                }
            }
        }
        let f = end as f64 / nf;
        // dev = F I - (prefix_outer/n - m̂ m̂ᵀ), built symmetric.
        for a in 0..p {
            for b in a..p {
                let vhat = prefix_outer[(a, b)] / nf - prefix[a] * prefix[b] / (nf * nf);
                let value = if a == b { f - vhat } else { -vhat };
                dev[(a, b)] = value;
                dev[(b, a)] = value;
            }
        }
        dev.mul_to(&dev, &mut dev_sq);
        kernel += dev_sq.scale((end - start) as f64);
    }
    kernel /= nf;

    spectral_from_whitened(&kernel, &w, directions)
}

/// Eigendecomposes a kernel expressed in the whitened metric and maps
/// the leading eigenvectors back to predictor scale.
fn spectral_from_whitened(
    kernel: &DMatrix<f64>,
    whitener: &DMatrix<f64>,
    directions: usize,
) -> Result<DirectionSet> {
    let (values, vectors) = sym_eigen(kernel)?;
    let mut dirs = Vec::with_capacity(directions);
    let mut weights = Vec::with_capacity(directions);
    for k in 0..directions {
        let back = whitener * vectors.column(k);
        dirs.push(Direction::new(back).ok_or(Error::SingularCovariance)?);
        weights.push(values[k]);
    }
    DirectionSet::new(dirs, weights)
}
