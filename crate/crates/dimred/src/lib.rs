//! Sufficient dimension reduction for regressions whose link function
//! is symmetric about the center of the index.
//!
//! Slope-based estimators (least squares, robust M-estimation) and
//! first-moment inverse regressions (slice means, cumulative means)
//! all estimate the index direction `β` in a single-index model
//! `y = f(βᵀx, ε)` — until `f` is even about the index center, at
//! which point their estimand collapses to the zero vector. This crate
//! implements that entire estimator family plus the remedy: fold the
//! response (or the predictors) about an estimated center so the
//! symmetry cancellation disappears, then re-estimate with any
//! first-moment method.
//!
//! # Modules
//! - [`data`]: validated datasets, unit directions, direction sets.
//! - [`numerics`]: moments, symmetric eigensolver, whitening,
//!   projection scores, canonical correlations, ranks.
//! - [`estimators`]: regression slopes (plain/Huber/trimmed),
//!   residual-curvature directions, slice-moment methods, cumulative
//!   methods, influence diagnostics, and the quadratic summary fit.
//! - [`transforms`]: the response fold and the predictor fold with
//!   their local-mean context.
//! - [`pipelines`]: composed fold pipelines, iterative refinement,
//!   and the two-direction workflow.
//! - [`simulation`]: benchmark models, the method registry, and the
//!   Monte Carlo runner.
//! - [`cli`]: the `simulate | fit | transform` command-line surface
//!   and CSV serialization.
//!
//! # Example
//! ```
//! use dimred::data::DataSet;
//! use dimred::pipelines::{composed_transform_estimator, ComposedConfig, FoldTarget};
//! use nalgebra::{DMatrix, DVector};
//! use rand::{Rng, SeedableRng};
//! use rand_chacha::ChaCha8Rng;
//! use rand_distr::StandardNormal;
//!
//! // y depends on x only through cos(0.5 βᵀx): a plain slope fails,
//! // the fold pipeline recovers β.
//! let mut rng = ChaCha8Rng::seed_from_u64(1);
//! let n = 400;
//! let p = 6;
//! let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
//! let beta = DVector::from_fn(p, |j, _| if j == 0 { 1.0 } else if j == 1 { -2.0 } else { 0.0 });
//! let y = DVector::from_fn(n, |i, _| {
//!     let t: f64 = x.row(i).transpose().dot(&beta);
//!     (0.5 * t).cos() + 0.05 * rng.sample::<f64, _>(StandardNormal)
//! });
//! let data = DataSet::new(y, x).unwrap();
//!
//! let (direction, _) =
//!     composed_transform_estimator(&data, &ComposedConfig::basic(FoldTarget::Response)).unwrap();
//! let cos2 = direction.as_vector().dot(&beta.normalize()).powi(2);
//! assert!(cos2 > 0.9);
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod estimators;
pub mod numerics;
pub mod pipelines;
pub mod simulation;
pub mod transforms;

pub use data::{DataSet, Direction, DirectionSet};
pub use error::{Error, Result};
