//! Composed estimation pipelines: fold-and-refit with optional
//! iteration, arbitrary initial/final estimator pairings, and the
//! two-direction workflow.

use crate::data::{DataSet, Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::estimators::{cume, cuve, phd_directions, save_est, sir, Regressor};
use crate::numerics::{ranks, squared_projection_correlation};
use crate::transforms::{
    local_mean_at_center, method1_fit, method2_fit, method2_original_cov, transform_predictors,
    transform_response, DEFAULT_NEIGHBORHOOD,
};

use nalgebra::DVector;

/// Default squared-correlation gap below which iteration stops.
pub const DEFAULT_REFINE_TOL: f64 = 1e-3;

/// Default iteration cap for refinement.
pub const DEFAULT_REFINE_MAX_ITER: usize = 10;

/// Why an iterative refinement stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Successive projections agreed within tolerance.
    Tolerance,
    /// The iteration cap was reached without agreement.
    MaxIterations,
    /// A projection degenerated; the last valid direction was kept.
    DegenerateProjection,
}

/// One refinement step: the direction produced at `index` and its
/// squared projection correlation with the previous step's direction
/// (`None` for the initial entry).
#[derive(Debug, Clone)]
pub struct IterationStep {
    /// Step number; 0 is the initial direction.
    pub index: usize,
    /// Direction after this step.
    pub direction: Direction,
    /// Squared correlation between this step's projection and the
    /// previous one's; `None` on the initial entry.
    pub cor2_with_previous: Option<f64>,
}

/// Trace of an iterative refinement.
#[derive(Debug, Clone)]
pub struct IterationLog {
    /// Initial direction followed by one entry per completed step.
    pub steps: Vec<IterationStep>,
    /// True when the stop came from the tolerance criterion.
    pub converged: bool,
    /// What ended the iteration.
    pub reason: StopReason,
}

/// Repeatedly applies `step`, feeding each output direction back in,
/// until successive projections agree (`1 - cor² < tol`) or `max_iter`
/// steps have run.
///
/// Step errors propagate, with one exception: if the agreement score is
/// undefined because a projection degenerated, the last valid direction
/// is returned with the log flagged [`StopReason::DegenerateProjection`].
pub fn iterative_refine(
    data: &DataSet,
    initial: Direction,
    mut step: impl FnMut(&DataSet, &Direction) -> Result<Direction>,
    tol: f64,
    max_iter: usize,
) -> Result<(Direction, IterationLog)> {
    if max_iter == 0 {
        return Err(Error::InvalidInput("iteration cap must be positive".into()));
    }
    if !(0.0..=1.0).contains(&tol) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in [0, 1], got {tol}"
        )));
    }

    let mut steps = vec![IterationStep {
        index: 0,
        direction: initial.clone(),
        cor2_with_previous: None,
    }];
    let mut current = initial;

    for index in 1..=max_iter {
        let next = step(data, &current)?;
        let cor2 = match squared_projection_correlation(
            data.x(),
            current.as_vector(),
            next.as_vector(),
        ) {
            Ok(c) => c,
            Err(Error::DegenerateProjection) => {
                return Ok((
                    current,
                    IterationLog {
                        steps,
                        converged: false,
                        reason: StopReason::DegenerateProjection,
                    },
                ));
            }
            Err(e) => return Err(e),
        };
        steps.push(IterationStep {
            index,
            direction: next.clone(),
            cor2_with_previous: Some(cor2),
        });
        current = next;
        if 1.0 - cor2 < tol {
            return Ok((
                current,
                IterationLog {
                    steps,
                    converged: true,
                    reason: StopReason::Tolerance,
                },
            ));
        }
    }

    Ok((
        current,
        IterationLog {
            steps,
            converged: false,
            reason: StopReason::MaxIterations,
        },
    ))
}

/// Which side of the data the fold rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldTarget {
    /// Fold the response, regress folded response on predictors.
    Response,
    /// Fold the predictors, regress the response on folded predictors.
    Predictors,
    /// Fold the predictors but keep the original predictor covariance
    /// in the slope solve.
    PredictorsOriginalCov,
}

/// Estimator supplying the starting direction of a composed pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialEstimator {
    /// Residual-curvature directions, optionally on rank-transformed
    /// responses (rank-based runs resist heavy-tailed links).
    Phd { rank_response: bool },
    /// Slice-variance directions with optional slice count.
    Save { h: Option<usize> },
    /// Cumulative variance directions.
    Cuve,
}

impl InitialEstimator {
    fn first_direction(&self, data: &DataSet) -> Result<Direction> {
        let set = match *self {
            InitialEstimator::Phd { rank_response } => {
                if rank_response {
                    let r = ranks(data.y().as_slice())?;
                    let ranked = data.with_response(DVector::from_vec(r))?;
                    phd_directions(&ranked, 1)?
                } else {
                    phd_directions(data, 1)?
                }
            }
            InitialEstimator::Save { h } => save_est(data, h, 1)?,
            InitialEstimator::Cuve => cuve(data, 1)?,
        };
        Ok(set.directions.into_iter().next().expect("one direction"))
    }
}

/// Estimator applied to the folded data each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalEstimator {
    /// A regression slope (plain, robust, or trimmed).
    Regression(Regressor),
    /// Slice-mean directions on the folded data.
    Sir { h: Option<usize> },
    /// Cumulative mean directions on the folded data.
    Cume,
}

/// Full description of a composed fold pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedConfig {
    /// Where the starting direction comes from.
    pub initial: InitialEstimator,
    /// Which side of the data the fold rewrites.
    pub fold: FoldTarget,
    /// Estimator run on the folded data.
    pub final_estimator: FinalEstimator,
    /// Refine by feeding the output direction back into the fold.
    pub iterate: bool,
    /// Neighbourhood size for the local response level.
    pub neighborhood: usize,
    /// Convergence tolerance when iterating.
    pub tol: f64,
    /// Iteration cap when iterating.
    pub max_iterations: usize,
}

impl ComposedConfig {
    /// The usual pipeline: start at the residual-curvature direction,
    /// fold, finish with one least-squares pass.
    pub fn basic(fold: FoldTarget) -> Self {
        ComposedConfig {
            initial: InitialEstimator::Phd {
                rank_response: false,
            },
            fold,
            final_estimator: FinalEstimator::Regression(Regressor::Ols),
            iterate: false,
            neighborhood: DEFAULT_NEIGHBORHOOD,
            tol: DEFAULT_REFINE_TOL,
            max_iterations: DEFAULT_REFINE_MAX_ITER,
        }
    }

    /// Same pipeline with iteration switched on.
    pub fn iterated(fold: FoldTarget) -> Self {
        ComposedConfig {
            iterate: true,
            ..Self::basic(fold)
        }
    }
}

/// Applies one fold-and-estimate round for a given direction.
fn fold_step(
    data: &DataSet,
    v: &Direction,
    fold: FoldTarget,
    final_estimator: FinalEstimator,
    m: usize,
) -> Result<Direction> {
    match final_estimator {
        FinalEstimator::Regression(reg) => match fold {
            FoldTarget::Response => method1_fit(data, v, reg, m).map(|(d, _)| d),
            FoldTarget::Predictors => method2_fit(data, v, reg, m).map(|(d, _)| d),
            FoldTarget::PredictorsOriginalCov => method2_original_cov(data, v, m),
        },
        FinalEstimator::Sir { .. } | FinalEstimator::Cume => {
            if fold == FoldTarget::PredictorsOriginalCov {
                return Err(Error::InvalidInput(
                    "the original-covariance fold only pairs with a regression".into(),
                ));
            }
            let ctx = local_mean_at_center(data, v, m)?;
            let folded = match fold {
                FoldTarget::Response => {
                    data.with_response(transform_response(data, &ctx))?
                }
                _ => data.with_predictors(transform_predictors(data, &ctx))?,
            };
            let set = match final_estimator {
                FinalEstimator::Sir { h } => sir(&folded, h, 1)?,
                _ => cume(&folded, 1)?,
            };
            Ok(set.directions.into_iter().next().expect("one direction"))
        }
    }
}

/// Runs a composed pipeline: initial estimator, fold, final estimator,
/// optionally iterated to a fixed direction.
///
/// Returns the estimated direction and, when iterating, the refinement
/// log.
pub fn composed_transform_estimator(
    data: &DataSet,
    config: &ComposedConfig,
) -> Result<(Direction, Option<IterationLog>)> {
    let v0 = config.initial.first_direction(data)?;
    if config.iterate {
        let (d, log) = iterative_refine(
            data,
            v0,
            |d, v| fold_step(d, v, config.fold, config.final_estimator, config.neighborhood),
            config.tol,
            config.max_iterations,
        )?;
        Ok((d, Some(log)))
    } else {
        let d = fold_step(data, &v0, config.fold, config.final_estimator, config.neighborhood)?;
        Ok((d, None))
    }
}

/// Two-direction workflow for links with one odd and one even component.
///
/// Direction 1 is the regression slope of the data as given (the odd
/// part survives a plain fit). Direction 2 folds along the leading
/// residual-curvature direction and refits with the same regressor.
/// Weights carry the two slope norms.
pub fn two_direction_ols(
    data: &DataSet,
    fold: FoldTarget,
    regressor: Regressor,
    m: usize,
) -> Result<DirectionSet> {
    let fit = regressor.fit(data)?;
    let w1 = fit.slope.norm();
    let d1 = Direction::from_slope(fit.slope)?;

    let v = phd_directions(data, 1)?
        .directions
        .into_iter()
        .next()
        .expect("one direction");
    let (d2, w2) = match fold {
        FoldTarget::Response => method1_fit(data, &v, regressor, m)?,
        FoldTarget::Predictors => method2_fit(data, &v, regressor, m)?,
        FoldTarget::PredictorsOriginalCov => {
            let d = method2_original_cov(data, &v, m)?;
            (d, f64::NAN)
        }
    };
    DirectionSet::new(vec![d1, d2], vec![w1, w2])
}
