//! Monte Carlo execution: replicate a (model, method) cell, score each
//! replication, and aggregate into table rows.

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numerics::{canonical_correlations, squared_projection_correlation};
use crate::simulation::methods::MethodConfig;
use crate::simulation::models::ModelSpec;

use nalgebra::DMatrix;
use rayon::prelude::*;

/// Fraction of failed replications above which a cell is flagged.
pub const UNRELIABLE_FAILURE_RATE: f64 = 0.05;

/// Aggregated result of one (model, method, n, p) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    /// Method display label.
    pub method: String,
    /// Observations per replication.
    pub n: usize,
    /// Predictor dimension.
    pub p: usize,
    /// Mean score per metric (one entry for single-direction models,
    /// two canonical correlations for two-direction models).
    pub metric_means: Vec<f64>,
    /// Standard deviation per metric, divisor R−1 over successes.
    pub metric_sds: Vec<f64>,
    /// Requested replication count.
    pub replications: usize,
    /// Replications excluded because the estimator or score failed.
    pub failures: usize,
    /// More than 5% of replications failed.
    pub unreliable: bool,
    /// Only one replication was requested, so spread is meaningless.
    pub single_replication: bool,
}

/// Outcome of a single replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    /// Replication index (also the generator stream).
    pub replication: u64,
    /// Scores when the replication succeeded.
    pub scores: Option<Vec<f64>>,
    /// Error message when it failed.
    pub message: Option<String>,
}

/// Summary plus the per-replication score log.
#[derive(Debug, Clone)]
pub struct CellResult {
    /// Aggregated cell.
    pub summary: McSummary,
    /// One record per replication, in replication order.
    pub records: Vec<ReplicationRecord>,
}

fn score_replication(data: &DataSet, spec: &ModelSpec, config: &MethodConfig) -> Result<Vec<f64>> {
    let q = spec.direction_count();
    let estimate = config.estimate(data, q)?;
    if q == 1 {
        let c = squared_projection_correlation(
            data.x(),
            &spec.betas[0],
            estimate.directions[0].as_vector(),
        )?;
        Ok(vec![c])
    } else {
        let project = |cols: &[&nalgebra::DVector<f64>]| {
            let mut m = DMatrix::zeros(data.n(), cols.len());
            for (k, c) in cols.iter().enumerate() {
                m.set_column(k, &(data.x() * *c));
            }
            m
        };
        let truth: Vec<&nalgebra::DVector<f64>> = spec.betas.iter().collect();
        let fitted: Vec<&nalgebra::DVector<f64>> = estimate
            .directions
            .iter()
            .map(|d| d.as_vector())
            .collect();
        canonical_correlations(&project(&truth), &project(&fitted))
    }
}

/// Runs every replication of one cell and aggregates.
///
/// Replications execute in parallel (under the ambient thread pool) but
/// are aggregated serially in replication order, so the result is
/// identical at any thread count. Failed replications are excluded from
/// the moments and counted; a cell with more than 5% failures is marked
/// unreliable, and a cell where every replication failed is an error.
pub fn run_cell(
    spec: &ModelSpec,
    config: &MethodConfig,
    replications: usize,
) -> Result<CellResult> {
    if replications == 0 {
        return Err(Error::InvalidInput(
            "need at least one replication".into(),
        ));
    }
    let records: Vec<ReplicationRecord> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let outcome = spec
                .generate_replicate(rep)
                .and_then(|data| score_replication(&data, spec, config));
            match outcome {
                Ok(scores) => ReplicationRecord {
                    replication: rep,
                    scores: Some(scores),
                    message: None,
                },
                Err(e) => ReplicationRecord {
                    replication: rep,
                    scores: None,
                    message: Some(e.to_string()),
                },
            }
        })
        .collect();

    let metric_count = spec.direction_count();
    let successes: Vec<&Vec<f64>> = records.iter().filter_map(|r| r.scores.as_ref()).collect();
    let failures = replications - successes.len();
    if successes.is_empty() {
        let last = records
            .iter()
            .rev()
            .find_map(|r| r.message.clone())
            .unwrap_or_default();
        return Err(Error::InvalidInput(format!(
            "all {replications} replications failed; last error: {last}"
        )));
    }

    let k = successes.len() as f64;
    let mut metric_means = vec![0.0; metric_count];
    let mut metric_sds = vec![0.0; metric_count];
    for m in 0..metric_count {
        let mut sum = 0.0;
        for s in &successes {
            sum += s[m];
        }
        let mean = sum / k;
        metric_means[m] = mean;
        if successes.len() > 1 {
            let mut ss = 0.0;
            for s in &successes {
                ss += (s[m] - mean).powi(2);
            }
            metric_sds[m] = (ss / (k - 1.0)).sqrt();
        }
    }

    Ok(CellResult {
        summary: McSummary {
            method: config.label.clone(),
            n: spec.n,
            p: spec.p,
            metric_means,
            metric_sds,
            replications,
            failures,
            unreliable: (failures as f64) > UNRELIABLE_FAILURE_RATE * (replications as f64),
            single_replication: replications == 1,
        },
        records,
    })
}

/// A deduplicated, grouped set of cells ready for serialization.
#[derive(Debug, Clone)]
pub struct TableReport {
    /// Rows grouped by method (first-appearance order), then by
    /// (p, n) ascending within each method.
    pub rows: Vec<McSummary>,
    /// One warning per duplicate (method, n, p) cell that was replaced.
    pub warnings: Vec<String>,
}

/// Groups cells into a report. Duplicate (method, n, p) cells keep the
/// later entry, with a warning recorded.
pub fn table(cells: Vec<McSummary>) -> Result<TableReport> {
    if cells.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut kept: Vec<McSummary> = Vec::with_capacity(cells.len());
    let mut warnings = Vec::new();
    for cell in cells {
        if let Some(existing) = kept
            .iter_mut()
            .find(|c| c.method == cell.method && c.n == cell.n && c.p == cell.p)
        {
            warnings.push(format!(
                "duplicate cell (method={}, n={}, p={}): keeping the later run",
                cell.method, cell.n, cell.p
            ));
            *existing = cell;
        } else {
            kept.push(cell);
        }
    }

    let mut method_order: Vec<String> = Vec::new();
    for c in &kept {
        if !method_order.contains(&c.method) {
            method_order.push(c.method.clone());
        }
    }
    kept.sort_by(|a, b| {
        let ia = method_order.iter().position(|m| *m == a.method).unwrap();
        let ib = method_order.iter().position(|m| *m == b.method).unwrap();
        ia.cmp(&ib).then(a.p.cmp(&b.p)).then(a.n.cmp(&b.n))
    });

    Ok(TableReport {
        rows: kept,
        warnings,
    })
}
