//! Randomised invariants: algebraic identities and equivariances that
//! must hold on every input, checked over generated data.
//!
//! Inputs are drawn from small integer lattices scaled to modest floats,
//! which keeps arithmetic exactly reproducible and makes shrunk
//! counterexamples readable.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use dimred::estimators::{cume, ols_fit, phd_directions, slice};
use dimred::numerics::{canonical_correlations, ranks, sample_moments, squared_projection_correlation, sym_eigen};
use dimred::transforms::{local_mean_at_center, transform_predictors, transform_response};
use dimred::{DataSet, Direction};

/// Lattice scalar in [-4, 4] with step 0.1.
fn lattice() -> impl Strategy<Value = f64> {
    (-40i32..=40).prop_map(|k| f64::from(k) / 10.0)
}

/// Row-major matrix entries for an n × p matrix.
fn lattice_matrix(n: usize, p: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(lattice(), n * p)
        .prop_map(move |v| DMatrix::from_row_slice(n, p, &v))
}

fn lattice_vector(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(lattice(), n).prop_map(DVector::from_vec)
}

/// (n, p, X, y) with predictors spread enough for moment work.
fn dataset_parts(
    n_range: std::ops::RangeInclusive<usize>,
    p_range: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (DMatrix<f64>, DVector<f64>)> {
    (n_range, p_range).prop_flat_map(|(n, p)| (lattice_matrix(n, p), lattice_vector(n)))
}

proptest! {
    #[test]
    fn eigendecomposition_reconstructs_symmetric_matrices(
        (p, entries) in (2usize..=6).prop_flat_map(|p| {
            (Just(p), prop::collection::vec(lattice(), p * p))
        })
    ) {
        let a = DMatrix::from_row_slice(p, p, &entries);
        let m = (&a + a.transpose()) * 0.5;
        let (values, vectors) = sym_eigen(&m).unwrap();

        // Orthonormal columns.
        let gram = vectors.transpose() * &vectors;
        let identity = DMatrix::<f64>::identity(p, p);
        prop_assert!((gram - identity).abs().max() < 1e-8);

        // Non-increasing eigenvalues.
        for k in 1..p {
            prop_assert!(values[k - 1] >= values[k] - 1e-12);
        }

        // Reconstruction.
        let rebuilt = &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
        let scale = 1.0 + m.abs().max();
        prop_assert!((rebuilt - &m).abs().max() < 1e-8 * scale);
    }

    #[test]
    fn projection_scores_ignore_direction_scaling(
        (x, _) in dataset_parts(12..=24, 2..=4),
        b_raw in prop::collection::vec(lattice(), 4),
        c in (1i32..=8).prop_map(|k| f64::from(k) / 2.0),
        flip in prop::bool::ANY,
    ) {
        let p = x.ncols();
        let b = DVector::from_fn(p, |j, _| b_raw[j] + if j == 0 { 5.0 } else { 0.0 });
        let scale = if flip { -c } else { c };

        let self_score = squared_projection_correlation(&x, &b, &b);
        prop_assume!(self_score.is_ok());
        prop_assert!((self_score.unwrap() - 1.0).abs() < 1e-12);

        let scaled = b.scale(scale);
        let cross = squared_projection_correlation(&x, &b, &scaled).unwrap();
        prop_assert!((cross - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_correlations_are_symmetric_and_bounded(
        (n, ka, kb) in (20usize..=35, 1usize..=3, 1usize..=3),
        seed in 0u64..1000,
    ) {
        // Deterministic fill from the seed keeps the blocks full rank
        // almost surely while staying reproducible under shrinking.
        let a = DMatrix::from_fn(n, ka, |i, j| ((seed as f64 + 1.0) * (i * ka + j + 1) as f64).sin());
        let b = DMatrix::from_fn(n, kb, |i, j| ((seed as f64 + 2.0) * (i * kb + j + 7) as f64).cos());

        let ab = canonical_correlations(&a, &b);
        let ba = canonical_correlations(&b, &a);
        prop_assume!(ab.is_ok() && ba.is_ok());
        let (ab, ba) = (ab.unwrap(), ba.unwrap());

        prop_assert_eq!(ab.len(), ka.min(kb));
        prop_assert_eq!(ab.len(), ba.len());
        for k in 0..ab.len() {
            prop_assert!((ab[k] - ba[k]).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&ab[k]));
            if k > 0 {
                prop_assert!(ab[k - 1] >= ab[k] - 1e-12);
            }
        }
    }

    #[test]
    fn ranks_are_invariant_under_increasing_affine_maps(
        values in prop::collection::vec(-50i32..=50, 2..40)
    ) {
        let y: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
        let mapped: Vec<f64> = values.iter().map(|&v| f64::from(2 * v + 1)).collect();
        let r1 = ranks(&y).unwrap();
        let r2 = ranks(&mapped).unwrap();
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn moments_match_a_naive_two_pass_oracle(
        (x, y) in dataset_parts(5..=25, 1..=4)
    ) {
        let data = DataSet::new(y.clone(), x.clone()).unwrap();
        let m = sample_moments(&data);
        let (n, p) = (x.nrows(), x.ncols());
        let nf = n as f64;

        let y_mean = y.iter().sum::<f64>() / nf;
        prop_assert!((m.y_mean - y_mean).abs() < 1e-10);
        for j in 0..p {
            let mean_j = (0..n).map(|i| x[(i, j)]).sum::<f64>() / nf;
            prop_assert!((m.mean[j] - mean_j).abs() < 1e-10);
            let cross: f64 = (0..n).map(|i| (x[(i, j)] - mean_j) * (y[i] - y_mean)).sum::<f64>() / nf;
            prop_assert!((m.cov_xy[j] - cross).abs() < 1e-10);
            for k in 0..p {
                let mean_k = (0..n).map(|i| x[(i, k)]).sum::<f64>() / nf;
                let cov: f64 = (0..n)
                    .map(|i| (x[(i, j)] - mean_j) * (x[(i, k)] - mean_k))
                    .sum::<f64>() / nf;
                prop_assert!((m.cov[(j, k)] - cov).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn slice_counts_form_a_balanced_stable_partition(
        (y, h) in (4usize..=40).prop_flat_map(|n| {
            (lattice_vector(n), 2usize..=n.min(6))
        })
    ) {
        let assignment = slice(&y, h).unwrap();
        prop_assert_eq!(assignment.h(), h);
        prop_assert_eq!(assignment.counts.iter().sum::<usize>(), y.len());

        let max = *assignment.counts.iter().max().unwrap();
        let min = *assignment.counts.iter().min().unwrap();
        prop_assert!(max - min <= 1);
        // Remainder rows land in the leading slices.
        for w in assignment.counts.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }

        // Slice labels are non-decreasing along the stable response order.
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap().then(a.cmp(&b)));
        for w in order.windows(2) {
            prop_assert!(assignment.slice_of[w[0]] <= assignment.slice_of[w[1]]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slope_directions_are_diagonal_scale_equivariant(
        (x, noise) in dataset_parts(25..=40, 2..=4),
        d_raw in prop::collection::vec(prop::sample::select(vec![0.5f64, 1.0, 2.0, 4.0]), 4),
    ) {
        let (n, p) = (x.nrows(), x.ncols());
        let y = DVector::from_fn(n, |i, _| x[(i, 0)] - 0.5 * x[(i, p - 1)] + 0.2 * noise[i]);

        let base = ols_fit(&DataSet::new(y.clone(), x.clone()).unwrap());
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        prop_assume!(base.slope.norm() > 1e-6);

        let mut scaled_x = x.clone();
        for j in 0..p {
            for i in 0..n {
                scaled_x[(i, j)] *= d_raw[j];
            }
        }
        let scaled = ols_fit(&DataSet::new(y, scaled_x).unwrap());
        prop_assume!(scaled.is_ok());
        let scaled = scaled.unwrap();

        // Scaling column j by d_j divides its slope by d_j.
        let mapped = DVector::from_fn(p, |j, _| base.slope[j] / d_raw[j]);
        let got = Direction::new(scaled.slope);
        let expected = Direction::new(mapped);
        prop_assume!(got.is_some() && expected.is_some());
        let cosine = got.unwrap().as_vector().dot(expected.unwrap().as_vector()).abs();
        prop_assert!(cosine > 1.0 - 1e-6, "cosine {cosine}");
    }

    #[test]
    fn cumulative_outputs_depend_on_responses_only_through_order(
        (x, y_int) in (20usize..=30, 2usize..=3).prop_flat_map(|(n, p)| {
            (lattice_matrix(n, p), prop::collection::vec(-20i32..=20, n))
        })
    ) {
        let n = x.nrows();
        let y = DVector::from_fn(n, |i, _| f64::from(y_int[i]));
        let y_mapped = DVector::from_fn(n, |i, _| f64::from(2 * y_int[i] + 1));

        let first = cume(&DataSet::new(y, x.clone()).unwrap(), 1);
        let second = cume(&DataSet::new(y_mapped, x).unwrap(), 1);
        prop_assume!(first.is_ok());
        let (first, second) = (first.unwrap(), second.unwrap());

        // An order-preserving response map keeps every tie and every
        // comparison, so the whole computation must be bit-identical.
        let a = first.directions[0].as_vector();
        let b = second.directions[0].as_vector();
        for j in 0..a.len() {
            prop_assert_eq!(a[j].to_bits(), b[j].to_bits());
        }
        prop_assert_eq!(first.weights[0].to_bits(), second.weights[0].to_bits());
    }

    #[test]
    fn curvature_directions_ignore_linear_response_trends(
        (x, noise) in dataset_parts(30..=40, 3..=3),
        shift in prop::collection::vec(lattice(), 3),
    ) {
        let n = x.nrows();
        let y = DVector::from_fn(n, |i, _| x[(i, 0)] * x[(i, 0)] + 0.1 * noise[i]);
        let y_shifted = DVector::from_fn(n, |i, _| {
            y[i] + shift[0] * x[(i, 0)] + shift[1] * x[(i, 1)] + shift[2] * x[(i, 2)]
        });

        let base = phd_directions(&DataSet::new(y, x.clone()).unwrap(), 1);
        let shifted = phd_directions(&DataSet::new(y_shifted, x).unwrap(), 1);
        prop_assume!(base.is_ok() && shifted.is_ok());
        let cosine = base.unwrap().directions[0]
            .as_vector()
            .dot(shifted.unwrap().directions[0].as_vector())
            .abs();
        // Linear trends are absorbed by the slope fit, leaving the
        // residual curvature intact up to solver rounding.
        prop_assert!(cosine > 1.0 - 1e-7, "cosine {cosine}");
    }

    #[test]
    fn folds_restore_responses_and_reflect_predictor_rows(
        (x, y) in dataset_parts(12..=25, 2..=4),
        axis in prop::collection::vec(lattice(), 4),
        m_frac in 1usize..=10,
    ) {
        let (n, p) = (x.nrows(), x.ncols());
        let dir = Direction::new(DVector::from_fn(p, |j, _| axis[j] + if j == 0 { 3.0 } else { 0.0 }));
        prop_assume!(dir.is_some());
        let dir = dir.unwrap();
        let m = m_frac.min(n);

        let data = DataSet::new(y.clone(), x.clone()).unwrap();
        let ctx = local_mean_at_center(&data, &dir, m).unwrap();

        // Response fold is an involution, and the kept side is untouched.
        let folded = transform_response(&data, &ctx);
        let proj = dir.project(&x);
        for i in 0..n {
            if proj[i] > ctx.center {
                prop_assert_eq!(folded[i].to_bits(), y[i].to_bits());
            }
        }
        let folded_data = data.with_response(folded).unwrap();
        let restored = transform_response(&folded_data, &ctx);
        for i in 0..n {
            let tol = 1e-9 * (1.0 + y[i].abs() + ctx.local_mean.abs());
            prop_assert!((restored[i] - y[i]).abs() <= tol);
        }

        // Predictor fold keeps every centred row up to a whole-row sign.
        let folded_x = transform_predictors(&data, &ctx);
        let mean = x.row_mean();
        for i in 0..n {
            let sign = if proj[i] > ctx.center { 1.0 } else { -1.0 };
            for j in 0..p {
                let expected = sign * (x[(i, j)] - mean[j]);
                prop_assert_eq!(folded_x[(i, j)].to_bits(), expected.to_bits());
            }
        }
    }
}
