//! Response slicing and the two classic slice-moment estimators.

use nalgebra::{DMatrix, DVector};

use crate::data::{DataSet, Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::numerics::{inverse_sqrt, sample_moments, sym_eigen};

/// Default slice count for a `p`-predictor problem.
pub fn default_slice_count(p: usize) -> usize {
    8.max(p + 3)
}

/// Assignment of observations to response-ordered slices.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceAssignment {
    /// Slice index (0-based, `0..h`) of each observation.
    pub slice_of: Vec<usize>,
    /// Observation count per slice; every entry is positive.
    pub counts: Vec<usize>,
}

impl SliceAssignment {
    /// Number of slices.
    pub fn h(&self) -> usize {
        self.counts.len()
    }
}

/// Splits observations into `h` near-equal slices by ascending response.
///
/// Ties sort stably by observation index. When `n` is not a multiple of
/// `h`, the first `n mod h` slices take the extra observation, so counts
/// never differ by more than one. Requires `2 <= h <= n`.
pub fn slice(y: &DVector<f64>, h: usize) -> Result<SliceAssignment> {
    let n = y.len();
    if h < 2 || h > n {
        return Err(Error::InvalidInput(format!(
            "slice count must lie in 2..={n}, got {h}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        y[a].partial_cmp(&y[b])
            .expect("finite responses")
            .then(a.cmp(&b))
    });

    let base = n / h;
    let remainder = n % h;
    let mut slice_of = vec![0usize; n];
    let mut counts = vec![0usize; h];
    let mut cursor = 0usize;
    for (s, count) in counts.iter_mut().enumerate() {
        *count = base + usize::from(s < remainder);
        for _ in 0..*count {
            slice_of[order[cursor]] = s;
            cursor += 1;
        }
    }
    Ok(SliceAssignment { slice_of, counts })
}

/// Per-slice predictor means.
pub fn slice_means(data: &DataSet, assignment: &SliceAssignment) -> Vec<DVector<f64>> {
    let p = data.p();
    let h = assignment.h();
    let mut sums = vec![DVector::<f64>::zeros(p); h];
    for i in 0..data.n() {
        let s = assignment.slice_of[i];
        for j in 0..p {
            sums[s][j] += data.x()[(i, j)];
        }
    }
    for (s, sum) in sums.iter_mut().enumerate() {
        *sum /= assignment.counts[s] as f64;
    }
    sums
}

/// Per-slice predictor covariances, each with divisor equal to the
/// slice count (matching the global divisor-`n` convention).
pub fn slice_covariances(
    data: &DataSet,
    assignment: &SliceAssignment,
) -> Vec<DMatrix<f64>> {
    let p = data.p();
    let h = assignment.h();
    let means = slice_means(data, assignment);
    let mut covs = vec![DMatrix::<f64>::zeros(p, p); h];
    for i in 0..data.n() {
        let s = assignment.slice_of[i];
        let c = data.row(i) - &means[s];
        for a in 0..p {
            for b in a..p {
                covs[s][(a, b)] += c[a] * c[b];
            }
        }
    }
    for (s, cov) in covs.iter_mut().enumerate() {
        for a in 0..p {
            for b in a..p {
                cov[(a, b)] /= assignment.counts[s] as f64;
                cov[(b, a)] = cov[(a, b)];
            }
        }
    }
    covs
}

/// Shared tail of the slice estimators: eigendecompose a whitened kernel
/// and map the leading eigenvectors back through the whitener.
fn spectral_directions(
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

fn check_direction_count(p: usize, directions: usize) -> Result<()> {
    if directions == 0 || directions > p {
        return Err(Error::InvalidInput(format!(
            "direction count must lie in 1..={p}, got {directions}"
        )));
    }
    Ok(())
}

/// Sliced inverse regression.
///
/// With whitener `W = S_x^{-1/2}` and slice proportions `p_h`, the
/// kernel is `W [Σ_h p_h (μ̂_h - x̄)(μ̂_h - x̄)ᵀ] W`; directions are
/// `W u` for its leading eigenvectors `u`, weights the eigenvalues.
/// `h` defaults to [`default_slice_count`].
pub fn sir(data: &DataSet, h: Option<usize>, directions: usize) -> Result<DirectionSet> {
    let p = data.p();
    check_direction_count(p, directions)?;
    let h = h.unwrap_or_else(|| default_slice_count(p));
    let assignment = slice(data.y(), h)?;

    let m = sample_moments(data);
    let w = inverse_sqrt(&m.cov)?;
    let means = slice_means(data, &assignment);
    let nf = data.n() as f64;

    let mut inner = DMatrix::zeros(p, p);
    for (s, mu) in means.iter().enumerate() {
        let weight = assignment.counts[s] as f64 / nf;
        let c = mu - &m.mean;
        for a in 0..p {
            let wa = weight * c[a];
            for b in a..p {
                inner[(a, b)] += wa * c[b];
            }
        }
    }
    for a in 0..p {
        for b in (a + 1)..p {
            inner[(b, a)] = inner[(a, b)];
        }
    }

    let kernel = &w * inner * &w;
    spectral_directions(&kernel, &w, directions)
}

/// Sliced average variance estimation.
///
/// With whitener `W = S_x^{-1/2}`, the kernel is
/// `Σ_h p_h (I - W Σ̂_h W)²` over per-slice covariances `Σ̂_h`.
/// Every slice must hold at least two observations
/// ([`Error::SliceTooSmall`] otherwise). `h` defaults to
/// [`default_slice_count`].
pub fn save_est(data: &DataSet, h: Option<usize>, directions: usize) -> Result<DirectionSet> {
    let p = data.p();
    check_direction_count(p, directions)?;
    let h = h.unwrap_or_else(|| default_slice_count(p));
    let assignment = slice(data.y(), h)?;
    for (s, &count) in assignment.counts.iter().enumerate() {
        if count < 2 {
            return Err(Error::SliceTooSmall {
                slice: s,
                count,
                required: 2,
            });
        }
    }

    let m = sample_moments(data);
    let w = inverse_sqrt(&m.cov)?;
    let covs = slice_covariances(data, &assignment);
    let nf = data.n() as f64;
    let eye = DMatrix::identity(p, p);

    let mut kernel = DMatrix::zeros(p, p);
    let mut dev = DMatrix::zeros(p, p);
    let mut dev_sq = DMatrix::zeros(p, p);
    for (s, cov) in covs.iter().enumerate() {
        let weight = assignment.counts[s] as f64 / nf;
        let mut whitened = &w * cov * &w;
        // Re-symmetrise: the triple product picks up rounding skew.
        whitened = (&whitened + whitened.transpose()).scale(0.5);
        dev.copy_from(&eye);
        dev -= &whitened;
        dev.mul_to(&dev.clone(), &mut dev_sq);
        kernel += dev_sq.scale(weight);
    }
    spectral_directions(&kernel, &w, directions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use crate::numerics::squared_projection_correlation;

    #[test]
    fn slice_counts_split_evenly() {
        let y = DVector::from_vec(vec![3.0, 1.0, 2.0, 6.0, 5.0, 4.0]);
        let a = slice(&y, 3).unwrap();
        assert_eq!(a.counts, vec![2, 2, 2]);
        // Smallest two responses (1, 2) land in slice 0.
        assert_eq!(a.slice_of[1], 0);
        assert_eq!(a.slice_of[2], 0);
        assert_eq!(a.slice_of[3], 2);
    }

    #[test]
    fn slice_remainder_goes_to_early_slices() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let a = slice(&y, 3).unwrap();
        assert_eq!(a.counts, vec![3, 2, 2]);
    }

    #[test]
    fn slice_ties_are_stable_by_index() {
        let y = DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0]);
        let a = slice(&y, 2).unwrap();
        assert_eq!(a.slice_of, vec![0, 0, 1, 1]);
    }

    #[test]
    fn slice_bounds_are_checked() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(slice(&y, 1).is_err());
        assert!(slice(&y, 4).is_err());
    }

    #[test]
    fn sir_recovers_linear_signal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 2000;
        let p = 5;
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut beta = DVector::zeros(p);
        beta[0] = 1.0;
        beta[1] = -2.0;
        let y = DVector::from_fn(n, |i, _| x.row(i).transpose().dot(&beta));
        let data = DataSet::new(y, x).unwrap();
        let set = sir(&data, Some(8), 1).unwrap();
        let score =
            squared_projection_correlation(data.x(), &beta, set.directions[0].as_vector())
                .unwrap();
        assert!(score > 0.99, "squared correlation {score} too low");
    }

    #[test]
    fn sir_accepts_one_point_per_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let p = 2;
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |i, _| x[(i, 0)] + 0.1 * x[(i, 1)]);
        let data = DataSet::new(y, x).unwrap();
        let set = sir(&data, Some(n), 2).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn save_requires_two_per_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let x = DMatrix::from_fn(n, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |i, _| x[(i, 0)]);
        let data = DataSet::new(y, x).unwrap();
        assert!(matches!(
            save_est(&data, Some(n), 1),
            Err(Error::SliceTooSmall { .. })
        ));
    }

    #[test]
    fn save_kernel_is_small_under_the_null() {
        // Independent response: every slice sees the same predictor law,
        // so the whitened slice covariances hover near the identity and
        // the top eigenvalue stays small.
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let n = 5000;
        let p = 5;
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let data = DataSet::new(y, x).unwrap();
        let set = save_est(&data, None, 1).unwrap();
        assert!(
            set.weights[0] < 0.2,
            "null top eigenvalue {} should be small",
            set.weights[0]
        );
    }

    #[test]
    fn save_recovers_symmetric_signal() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n = 4000;
        let p = 5;
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut beta = DVector::zeros(p);
        beta[0] = 1.0;
        beta[1] = -2.0;
        let y = DVector::from_fn(n, |i, _| {
            let t: f64 = x.row(i).transpose().dot(&beta);
            t * t + 0.1 * rng.sample::<f64, _>(StandardNormal)
        });
        let data = DataSet::new(y, x).unwrap();
        let set = save_est(&data, None, 1).unwrap();
        let score =
            squared_projection_correlation(data.x(), &beta, set.directions[0].as_vector())
                .unwrap();
        assert!(score > 0.95, "squared correlation {score} too low");
    }
}
