//! Principal Hessian directions estimated from least-squares residuals.

use nalgebra::DMatrix;

use crate::data::{DataSet, Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::numerics::{inverse_sqrt, sample_moments, sym_eigen};

use super::regression::ols_fit;

/// Residual-weighted second-moment directions.
///
/// Let `r_i` be the least-squares residuals of the response on the
/// predictors and form
/// `Σ̂ = (1/n) Σ r_i (x_i - x̄)(x_i - x̄)ᵀ`.
/// The directions are eigenvectors of `S_x⁻¹ Σ̂`, computed stably in the
/// whitened metric: eigenvectors `u` of `S_x^{-1/2} Σ̂ S_x^{-1/2}`,
/// mapped back through `S_x^{-1/2} u` and normalised.
///
/// Because curvature can load either sign, directions are ordered by
/// eigenvalue magnitude (descending; equal magnitudes put the positive
/// value first). Weights carry the signed eigenvalues in that order.
pub fn phd_directions(data: &DataSet, directions: usize) -> Result<DirectionSet> {
    let p = data.p();
    if directions == 0 || directions > p {
        return Err(Error::InvalidInput(format!(
            "direction count must lie in 1..={p}, got {directions}"
        )));
    }

    let fit = ols_fit(data)?;
    let m = sample_moments(data);
    let n = data.n();
    let nf = n as f64;

    // Residual-weighted moment, accumulated symmetric entry by entry.
    let mut rxx = DMatrix::zeros(p, p);
    for i in 0..n {
        let r = fit.residuals[i];
        let c = data.row(i) - &m.mean;
        for a in 0..p {
            let ra = r * c[a];
            for b in a..p {
                rxx[(a, b)] += ra * c[b];
            }
        }
    }
    for a in 0..p {
        for b in (a + 1)..p {
            rxx[(b, a)] = rxx[(a, b)];
        }
    }
    rxx /= nf;

    let w = inverse_sqrt(&m.cov)?;
    let whitened = &w * &rxx * &w;
    let (values, vectors) = sym_eigen(&whitened)?;

    // Order by |eigenvalue| descending; magnitude ties favour the
    // positive eigenvalue, then the original (descending-value) order.
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .abs()
            .partial_cmp(&values[a].abs())
            .expect("finite eigenvalues")
            .then(values[b].partial_cmp(&values[a]).expect("finite"))
            .then(a.cmp(&b))
    });

    let mut dirs = Vec::with_capacity(directions);
    let mut weights = Vec::with_capacity(directions);
    for &k in order.iter().take(directions) {
        let back = &w * vectors.column(k);
        let dir = Direction::new(back).ok_or(Error::SingularCovariance)?;
        dirs.push(dir);
        weights.push(values[k]);
    }
    DirectionSet::new(dirs, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use crate::numerics::squared_projection_correlation;

    #[test]
    fn constant_response_gives_zero_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 40;
        let p = 3;
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_element(n, 2.5);
        let set = phd_directions(&DataSet::new(y, x).unwrap(), p).unwrap();
        for w in &set.weights {
            assert!(w.abs() < 1e-10, "eigenvalue {w} should vanish");
        }
    }

    #[test]
    fn recovers_pure_quadratic_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 5000;
        let p = 10;
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut beta = DVector::zeros(p);
        beta[0] = 1.0;
        beta[1] = -2.0;
        let y = DVector::from_fn(n, |i, _| {
            let t: f64 = x.row(i).transpose().dot(&beta);
            t * t
        });
        let data = DataSet::new(y, x).unwrap();
        let set = phd_directions(&data, 1).unwrap();
        let score = squared_projection_correlation(
            data.x(),
            &beta,
            set.directions[0].as_vector(),
        )
        .unwrap();
        assert!(score > 0.99, "squared correlation {score} too low");
    }

    #[test]
    fn direction_count_is_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DMatrix::from_fn(30, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(30, |i, _| x[(i, 0)]);
        let data = DataSet::new(y, x).unwrap();
        assert!(phd_directions(&data, 0).is_err());
        assert!(phd_directions(&data, 4).is_err());
    }
}
