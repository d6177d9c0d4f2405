//! Named estimation recipes: the registry that maps method names on
//! the command line to concrete pipelines.

use crate::data::{DataSet, Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::estimators::{
    cume, cuve, phd_directions, save_est, sir, BaseRegressor, Regressor, DEFAULT_HUBER_TUNING,
};
use crate::estimators::DEFAULT_TRIM_FRACTION;
use crate::numerics::ranks;
use crate::pipelines::{
    composed_transform_estimator, two_direction_ols, ComposedConfig, FinalEstimator, FoldTarget,
    InitialEstimator, DEFAULT_REFINE_MAX_ITER, DEFAULT_REFINE_TOL,
};
use crate::transforms::DEFAULT_NEIGHBORHOOD;

use nalgebra::DVector;

/// How a named method estimates directions.
#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    /// Regression slope, normalized.
    Slope(Regressor),
    /// Residual-curvature directions, optionally on ranked responses.
    Phd { rank_response: bool },
    /// Slice-mean directions.
    Sir { h: Option<usize> },
    /// Slice-variance directions.
    Save { h: Option<usize> },
    /// Cumulative-mean directions.
    Cume,
    /// Cumulative-variance directions.
    Cuve,
    /// A fold pipeline (initial estimate, fold, refit, optional iteration).
    Composed(ComposedConfig),
    /// Slope for direction 1 plus a fold refit for direction 2.
    TwoDirection {
        fold: FoldTarget,
        regressor: Regressor,
    },
}

/// A method name bound to its recipe.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    /// Display label used in reports.
    pub label: String,
    /// What to run.
    pub recipe: Recipe,
}

/// Tunable knobs shared by the recipes; `None` means the documented
/// default (slice count max(8, p+3), neighbourhood 10, Huber tuning
/// 1.345, trim fraction 0.10, tolerance 0.001, iteration cap 10).
#[derive(Debug, Clone, Copy, Default)]
pub struct MethodOptions {
    /// Slice count for slice-based estimators.
    pub h: Option<usize>,
    /// Neighbourhood size for the local response level.
    pub neighborhood: Option<usize>,
    /// Huber tuning constant.
    pub tuning: Option<f64>,
    /// Fraction of most-influential rows dropped by trimmed fits.
    pub trim_fraction: Option<f64>,
    /// Convergence tolerance for iterated pipelines.
    pub tol: Option<f64>,
    /// Iteration cap for iterated pipelines.
    pub max_iterations: Option<usize>,
}

impl MethodOptions {
    fn huber(&self) -> Regressor {
        Regressor::Huber {
            tuning: self.tuning.unwrap_or(DEFAULT_HUBER_TUNING),
        }
    }

    fn trimmed(&self) -> Regressor {
        Regressor::Trimmed {
            fraction: self.trim_fraction.unwrap_or(DEFAULT_TRIM_FRACTION),
            base: BaseRegressor::Ols,
        }
    }

    fn composed(
        &self,
        initial: InitialEstimator,
        fold: FoldTarget,
        final_estimator: FinalEstimator,
        iterate: bool,
    ) -> Recipe {
        Recipe::Composed(ComposedConfig {
            initial,
            fold,
            final_estimator,
            iterate,
            neighborhood: self.neighborhood.unwrap_or(DEFAULT_NEIGHBORHOOD),
            tol: self.tol.unwrap_or(DEFAULT_REFINE_TOL),
            max_iterations: self.max_iterations.unwrap_or(DEFAULT_REFINE_MAX_ITER),
        })
    }
}

/// Resolves a method name to its recipe, applying option overrides.
///
/// Names are case-insensitive. The registry:
///
/// | name | estimate |
/// |------|----------|
/// | `ols` | least-squares slope |
/// | `rr` | Huber slope |
/// | `phd` / `rank-phd` | residual curvature (raw / ranked response) |
/// | `sir`, `save`, `cume`, `cuve` | inverse-moment estimators |
/// | `m1`, `m1-it` | response fold after a curvature start |
/// | `m2`, `m2-it` | predictor fold after a curvature start |
/// | `m2-ols1` | predictor fold, original-covariance slope |
/// | `rm1`, `rm2` | folds with ranked-response start and Huber refit |
/// | `m1-trim`, `m2-trim` | folds with ranked start and trimmed refit |
/// | `save-sir-m2[-it]` | variance-slice start, predictor fold, mean-slice refit |
/// | `cuve-cume-m2[-it]` | cumulative-variance start, predictor fold, cumulative-mean refit |
/// | `two-dir-ols-m1/m2`, `two-dir-rr-m1/m2` | slope direction plus fold direction |
pub fn parse_method(name: &str, opts: &MethodOptions) -> Result<MethodConfig> {
    let key = name.to_ascii_lowercase();
    let phd_start = InitialEstimator::Phd {
        rank_response: false,
    };
    let rank_start = InitialEstimator::Phd {
        rank_response: true,
    };
    let ols_refit = FinalEstimator::Regression(Regressor::Ols);
    let huber_refit = FinalEstimator::Regression(opts.huber());
    let trimmed_refit = FinalEstimator::Regression(opts.trimmed());

    let (label, recipe) = match key.as_str() {
        "ols" => ("OLS", Recipe::Slope(Regressor::Ols)),
        "rr" => ("RR", Recipe::Slope(opts.huber())),
        "phd" => (
            "PHD",
            Recipe::Phd {
                rank_response: false,
            },
        ),
        "rank-phd" => (
            "rank-PHD",
            Recipe::Phd {
                rank_response: true,
            },
        ),
        "sir" => ("SIR", Recipe::Sir { h: opts.h }),
        "save" => ("SAVE", Recipe::Save { h: opts.h }),
        "cume" => ("CUME", Recipe::Cume),
        "cuve" => ("CUVE", Recipe::Cuve),
        "m1" => (
            "M1",
            opts.composed(phd_start, FoldTarget::Response, ols_refit, false),
        ),
        "m1-it" => (
            "M1-it",
            opts.composed(phd_start, FoldTarget::Response, ols_refit, true),
        ),
        "m2" => (
            "M2",
            opts.composed(phd_start, FoldTarget::Predictors, ols_refit, false),
        ),
        "m2-it" => (
            "M2-it",
            opts.composed(phd_start, FoldTarget::Predictors, ols_refit, true),
        ),
        "m2-ols1" => (
            "M2-ols1",
            opts.composed(
                phd_start,
                FoldTarget::PredictorsOriginalCov,
                ols_refit,
                false,
            ),
        ),
        "rm1" => (
            "RM1",
            opts.composed(rank_start, FoldTarget::Response, huber_refit, false),
        ),
        "rm2" => (
            "RM2",
            opts.composed(rank_start, FoldTarget::Predictors, huber_refit, false),
        ),
        "m1-trim" => (
            "M1-trim",
            opts.composed(rank_start, FoldTarget::Response, trimmed_refit, false),
        ),
        "m2-trim" => (
            "M2-trim",
            opts.composed(rank_start, FoldTarget::Predictors, trimmed_refit, false),
        ),
        "save-sir-m2" => (
            "SAVE-SIR-M2",
            opts.composed(
                InitialEstimator::Save { h: opts.h },
                FoldTarget::Predictors,
                FinalEstimator::Sir { h: opts.h },
                false,
            ),
        ),
        "save-sir-m2-it" => (
            "SAVE-SIR-M2-it",
            opts.composed(
                InitialEstimator::Save { h: opts.h },
                FoldTarget::Predictors,
                FinalEstimator::Sir { h: opts.h },
                true,
            ),
        ),
        "cuve-cume-m2" => (
            "CUVE-CUME-M2",
            opts.composed(
                InitialEstimator::Cuve,
                FoldTarget::Predictors,
                FinalEstimator::Cume,
                false,
            ),
        ),
        "cuve-cume-m2-it" => (
            "CUVE-CUME-M2-it",
            opts.composed(
                InitialEstimator::Cuve,
                FoldTarget::Predictors,
                FinalEstimator::Cume,
                true,
            ),
        ),
        "two-dir-ols-m1" => (
            "two-dir-OLS-M1",
            Recipe::TwoDirection {
                fold: FoldTarget::Response,
                regressor: Regressor::Ols,
            },
        ),
        "two-dir-ols-m2" => (
            "two-dir-OLS-M2",
            Recipe::TwoDirection {
                fold: FoldTarget::Predictors,
                regressor: Regressor::Ols,
            },
        ),
        "two-dir-rr-m1" => (
            "two-dir-RR-M1",
            Recipe::TwoDirection {
                fold: FoldTarget::Response,
                regressor: opts.huber(),
            },
        ),
        "two-dir-rr-m2" => (
            "two-dir-RR-M2",
            Recipe::TwoDirection {
                fold: FoldTarget::Predictors,
                regressor: opts.huber(),
            },
        ),
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown method '{name}'; see the method registry in the docs"
            )))
        }
    };
    Ok(MethodConfig {
        label: label.to_string(),
        recipe,
    })
}

/// Bundled study sweeps by alias.
fn sweep_names(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "all-table1" => Some(&["ols", "phd", "m1", "m1-it", "m2", "m2-it"]),
        "all-table2" => Some(&[
            "ols", "rr", "rank-phd", "rm1", "rm2", "m1-trim", "m2-trim",
        ]),
        "all-table3" => Some(&[
            "sir",
            "save",
            "cume",
            "cuve",
            "save-sir-m2",
            "save-sir-m2-it",
            "cuve-cume-m2",
            "cuve-cume-m2-it",
        ]),
        "all-table4" => Some(&["two-dir-ols-m1", "two-dir-ols-m2", "sir", "phd"]),
        _ => None,
    }
}

/// Expands a method argument into a list of configs.
///
/// The argument is a comma-separated list whose entries are method names
/// or bundled study sweeps (`all-table1` .. `all-table4`); sweeps expand
/// in place, in order.
pub fn resolve_methods(name: &str, opts: &MethodOptions) -> Result<Vec<MethodConfig>> {
    let mut out = Vec::new();
    for part in name.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::InvalidInput(format!(
                "empty method name in list '{name}'"
            )));
        }
        match sweep_names(part.to_ascii_lowercase().as_str()) {
            Some(names) => {
                for n in names {
                    out.push(parse_method(n, opts)?);
                }
            }
            None => out.push(parse_method(part, opts)?),
        }
    }
    Ok(out)
}

impl MethodConfig {
    /// Runs the recipe, returning `q` estimated directions.
    ///
    /// Slope and fold pipelines produce exactly one direction; the
    /// two-direction recipe produces exactly two; spectral estimators
    /// produce any `q` up to the predictor dimension.
    pub fn estimate(&self, data: &DataSet, q: usize) -> Result<DirectionSet> {
        match &self.recipe {
            Recipe::Slope(reg) => {
                require_q(&self.label, q, 1)?;
                let fit = reg.fit(data)?;
                let w = fit.slope.norm();
                let d = Direction::from_slope(fit.slope)?;
                DirectionSet::new(vec![d], vec![w])
            }
            Recipe::Phd { rank_response } => {
                if *rank_response {
                    let r = ranks(data.y().as_slice())?;
                    let ranked = data.with_response(DVector::from_vec(r))?;
                    phd_directions(&ranked, q)
                } else {
                    phd_directions(data, q)
                }
            }
            Recipe::Sir { h } => sir(data, *h, q),
            Recipe::Save { h } => save_est(data, *h, q),
            Recipe::Cume => cume(data, q),
            Recipe::Cuve => cuve(data, q),
            Recipe::Composed(cfg) => {
                require_q(&self.label, q, 1)?;
                let (d, _) = composed_transform_estimator(data, cfg)?;
                DirectionSet::new(vec![d], vec![1.0])
            }
            Recipe::TwoDirection { fold, regressor } => {
                require_q(&self.label, q, 2)?;
                two_direction_ols(
                    data,
                    *fold,
                    *regressor,
                    DEFAULT_NEIGHBORHOOD,
                )
            }
        }
    }
}

fn require_q(label: &str, q: usize, expected: usize) -> Result<()> {
    if q == expected {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "method {label} produces exactly {expected} direction(s), {q} requested"
        )))
    }
}
