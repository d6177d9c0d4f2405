//! Command-line surface: `simulate`, `fit`, and `transform`.
//!
//! The CLI is a thin orchestrator over the library. All numeric output
//! is CSV; progress and warnings go to standard error; every error
//! path exits nonzero with a single diagnostic line.

pub mod csv_io;

use crate::data::{DataSet, Direction, DirectionSet};
use crate::error::{Error, Result};
use crate::estimators::quadratic_fit;
use crate::numerics::ranks;
use crate::simulation::{
    parse_method, resolve_methods, run_cell, table, McSummary, MethodOptions, ModelId, ModelSpec,
    ReplicationRecord,
};
use crate::transforms::{
    local_mean_at_center, transform_predictors, transform_response, DEFAULT_NEIGHBORHOOD,
};
use csv_io::{
    load_csv, load_directions_csv, write_dataset, write_directions, write_essp, write_pairs,
    write_scores, write_table, LoadedCsv, ResponseSelector,
};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

/// Name of the environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "DIMRED_THREADS";

/// Dimension-reduction toolkit: Monte Carlo studies, direction
/// estimation on CSV data, and response/predictor folding.
#[derive(Debug, Parser)]
#[command(name = "dimred", version, about)]
pub struct Cli {
    /// Worker threads for replication parallelism
    /// (default: DIMRED_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

/// Top-level subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo study on a benchmark model and write the
    /// summary table as CSV.
    Simulate(SimulateArgs),
    /// Estimate directions from a CSV dataset and write direction,
    /// summary-plot, and diagnostic files.
    Fit(FitArgs),
    /// Fold the response and/or predictors of a CSV dataset along a
    /// direction and write the transformed data.
    Transform(TransformArgs),
}

/// Shared tuning knobs; unset knobs use the documented defaults.
#[derive(Debug, Args, Clone, Copy)]
pub struct KnobArgs {
    /// Slice count for slice-based estimators (default max(8, p+3)).
    #[arg(long)]
    pub slices: Option<usize>,
    /// Neighbourhood size for the local response level (default 10).
    #[arg(long)]
    pub neighborhood: Option<usize>,
    /// Huber tuning constant (default 1.345).
    #[arg(long)]
    pub tuning: Option<f64>,
    /// Fraction of most-influential rows dropped by trimmed fits
    /// (default 0.10).
    #[arg(long)]
    pub trim_fraction: Option<f64>,
    /// Convergence tolerance for iterated pipelines (default 0.001).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap for iterated pipelines (default 10).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

impl KnobArgs {
    fn options(&self) -> MethodOptions {
        MethodOptions {
            h: self.slices,
            neighborhood: self.neighborhood,
            tuning: self.tuning,
            trim_fraction: self.trim_fraction,
            tol: self.tol,
            max_iterations: self.max_iter,
        }
    }
}

/// Arguments of `dimred simulate`.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Benchmark model id (1-4).
    #[arg(long)]
    pub model: u8,
    /// Observations per replication; comma-separated list runs one
    /// cell per value.
    #[arg(long, default_value = "100")]
    pub n: String,
    /// Predictor dimension; comma-separated list runs one cell per
    /// value (default: the model's dimension).
    #[arg(long)]
    pub p: Option<String>,
    /// Method name or bundled sweep (all-table1 .. all-table4).
    #[arg(long)]
    pub method: String,
    /// Replications per cell.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Master seed; replication r uses stream r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub knobs: KnobArgs,
    /// Write the summary table here (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a per-replication score log here.
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

/// Response pre-transformations for `fit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PreTransform {
    /// Use the response as is.
    None,
    /// Square root (requires nonnegative responses).
    Sqrt,
    /// Average ranks.
    Rank,
}

/// Arguments of `dimred fit`.
#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Response column: a header name or a 1-based position.
    #[arg(long)]
    pub response: String,
    /// Estimation method name.
    #[arg(long, default_value = "ols")]
    pub method: String,
    /// Number of directions to estimate.
    #[arg(long, default_value_t = 1)]
    pub directions: usize,
    /// Response pre-transformation.
    #[arg(long, value_enum, default_value_t = PreTransform::None)]
    pub pre: PreTransform,
    #[command(flatten)]
    pub knobs: KnobArgs,
    /// Output prefix; writes PREFIX_directions.csv, PREFIX_essp.csv,
    /// and for two directions the quadratic-fit diagnostics.
    #[arg(long)]
    pub out: PathBuf,
}

/// Which side of the data `transform` rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformWhat {
    /// Fold the response only.
    Response,
    /// Fold the predictors only.
    Predictors,
    /// Fold both.
    Both,
}

/// Arguments of `dimred transform`.
#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Response column: a header name or a 1-based position.
    #[arg(long)]
    pub response: String,
    /// Read the fold direction from a directions CSV
    /// (first direction column is used).
    #[arg(long)]
    pub direction_file: Option<PathBuf>,
    /// Estimate the fold direction with this method instead.
    #[arg(long)]
    pub method: Option<String>,
    /// Which side of the data to fold.
    #[arg(long, value_enum, default_value_t = TransformWhat::Both)]
    pub what: TransformWhat,
    #[command(flatten)]
    pub knobs: KnobArgs,
    /// Output prefix; writes PREFIX_transformed.csv and
    /// PREFIX_context.csv.
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs a parsed command line, honoring the thread configuration.
pub fn run(cli: Cli) -> Result<()> {
    let threads = match cli.threads {
        Some(0) => {
            return Err(Error::InvalidInput(
                "--threads must be at least 1".into(),
            ))
        }
        Some(t) => Some(t),
        None => std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|t| *t > 0),
    };
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Transform(args) => cmd_transform(&args),
    }
}

fn parse_count_list(text: &str, what: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let v: usize = part.parse().map_err(|_| {
            Error::InvalidInput(format!("{what} list entry '{part}' is not a count"))
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!("{what} list is empty")));
    }
    Ok(out)
}

fn create_out(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs the Monte Carlo cells requested on the command line.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let opts = args.knobs.options();
    let methods = resolve_methods(&args.method, &opts)?;
    let model = ModelId::from_index(args.model)?;
    let ns = parse_count_list(&args.n, "--n")?;
    let ps: Vec<Option<usize>> = match &args.p {
        Some(text) => parse_count_list(text, "--p")?.into_iter().map(Some).collect(),
        None => vec![None],
    };

    let mut cells: Vec<McSummary> = Vec::new();
    let mut score_blocks: Vec<(String, usize, usize, Vec<ReplicationRecord>)> = Vec::new();
    for method in &methods {
        for &p in &ps {
            for &n in &ns {
                let spec = ModelSpec::new(model, n, p, args.seed)?;
                let cell = run_cell(&spec, method, args.reps)?;
                if cell.summary.unreliable {
                    eprintln!(
                        "warning: cell (method={}, n={}, p={}) had {} of {} replications fail",
                        cell.summary.method,
                        cell.summary.n,
                        cell.summary.p,
                        cell.summary.failures,
                        cell.summary.replications
                    );
                }
                if args.scores.is_some() {
                    score_blocks.push((
                        cell.summary.method.clone(),
                        cell.summary.n,
                        cell.summary.p,
                        cell.records,
                    ));
                }
                cells.push(cell.summary);
            }
        }
    }

    let report = table(cells)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match &args.out {
        Some(path) => write_table(create_out(path)?, &report)?,
        None => write_table(io::stdout().lock(), &report)?,
    }
    if let Some(path) = &args.scores {
        write_scores(create_out(path)?, &score_blocks)?;
    }
    Ok(())
}

fn apply_pre(loaded: &LoadedCsv, pre: PreTransform) -> Result<(DataSet, String)> {
    let name = &loaded.response_name;
    match pre {
        PreTransform::None => Ok((loaded.dataset.clone(), name.clone())),
        PreTransform::Sqrt => {
            let y = loaded.dataset.y();
            if y.iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "--pre sqrt needs a nonnegative response, but '{name}' has negative values"
                )));
            }
            let data = loaded
                .dataset
                .with_response(y.map(|v| v.sqrt()))?;
            Ok((data, format!("sqrt_{name}")))
        }
        PreTransform::Rank => {
            let r = ranks(loaded.dataset.y().as_slice())?;
            let data = loaded.dataset.with_response(DVector::from_vec(r))?;
            Ok((data, format!("rank_{name}")))
        }
    }
}

fn projection_matrix(data: &DataSet, set: &DirectionSet) -> DMatrix<f64> {
    let mut proj = DMatrix::zeros(data.n(), set.len());
    for (k, d) in set.directions.iter().enumerate() {
        proj.set_column(k, &(data.x() * d.as_vector()));
    }
    proj
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push("_");
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Estimates directions from a CSV dataset and writes the direction,
/// summary-plot, and (for two directions) quadratic diagnostic files.
pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let loaded = load_csv(&args.input, &ResponseSelector::parse(&args.response))?;
    let (data, response_label) = apply_pre(&loaded, args.pre)?;
    let method = parse_method(&args.method, &args.knobs.options())?;
    let set = method.estimate(&data, args.directions)?;

    write_directions(
        create_out(&prefixed(&args.out, "directions.csv"))?,
        &loaded.predictor_names,
        &set,
    )?;
    let proj = projection_matrix(&data, &set);
    write_essp(
        create_out(&prefixed(&args.out, "essp.csv"))?,
        &proj,
        &response_label,
        data.y(),
    )?;
    eprintln!(
        "fit: method {} estimated {} direction(s) from {} rows",
        method.label,
        set.len(),
        data.n()
    );

    if args.directions == 2 {
        let fit = quadratic_fit(data.y(), &proj)?;
        {
            let mut w = csv::Writer::from_writer(create_out(&prefixed(&args.out, "quadratic.csv"))?);
            w.write_record(["term", "estimate", "std_error", "t_value", "p_value"])?;
            for t in &fit.terms {
                w.write_record([
                    t.name.clone(),
                    csv_io::fmt17(t.estimate),
                    csv_io::fmt17(t.std_error),
                    csv_io::fmt17(t.t_value),
                    csv_io::fmt17(t.p_value),
                ])?;
            }
            w.into_inner()
                .map_err(|e| Error::InvalidInput(format!("flushing CSV output failed: {e}")))?;
        }
        {
            let mut w =
                csv::Writer::from_writer(create_out(&prefixed(&args.out, "fit_summary.csv"))?);
            w.write_record(["r_squared", "n", "terms"])?;
            w.write_record([
                csv_io::fmt17(fit.r_squared),
                data.n().to_string(),
                fit.terms.len().to_string(),
            ])?;
            w.into_inner()
                .map_err(|e| Error::InvalidInput(format!("flushing CSV output failed: {e}")))?;
        }
        write_pairs(
            create_out(&prefixed(&args.out, "residuals.csv"))?,
            ("fitted", "residual"),
            &fit.fitted,
            &fit.residuals,
        )?;

        // Normal-quantile coordinates of standardized residuals.
        let n = fit.residuals.len();
        let sd = {
            let mean = fit.residuals.mean();
            let ss: f64 = fit.residuals.iter().map(|r| (r - mean).powi(2)).sum();
            (ss / (n as f64 - 1.0)).sqrt()
        };
        if sd > 0.0 {
            let mut std_res: Vec<f64> = fit.residuals.iter().map(|r| r / sd).collect();
            std_res.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            let theoretical = DVector::from_fn(n, |i, _| {
                normal.inverse_cdf((i as f64 + 1.0 - 0.375) / (n as f64 + 0.25))
            });
            write_pairs(
                create_out(&prefixed(&args.out, "qq.csv"))?,
                ("theoretical_quantile", "sample_quantile"),
                &theoretical,
                &DVector::from_vec(std_res),
            )?;
        }
        eprintln!("fit: quadratic summary R^2 = {:.4}", fit.r_squared);
    }
    Ok(())
}

/// Folds a CSV dataset along a direction and writes the transformed
/// data plus the transformation context.
pub fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let loaded = load_csv(&args.input, &ResponseSelector::parse(&args.response))?;
    let data = &loaded.dataset;

    let direction = match (&args.direction_file, &args.method) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidInput(
                "give either --direction-file or --method, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::InvalidInput(
                "a fold direction is required: pass --direction-file or --method".into(),
            ))
        }
        (Some(path), None) => {
            let columns = load_directions_csv(path)?;
            if columns[0].len() != data.p() {
                return Err(Error::InvalidInput(format!(
                    "direction has {} coefficients but the data has {} predictors",
                    columns[0].len(),
                    data.p()
                )));
            }
            Direction::new(columns[0].clone()).ok_or(Error::ZeroSlope)?
        }
        (None, Some(name)) => {
            let method = parse_method(name, &args.knobs.options())?;
            let set = method.estimate(data, 1)?;
            set.directions.into_iter().next().expect("one direction")
        }
    };

    let m = args.knobs.neighborhood.unwrap_or(DEFAULT_NEIGHBORHOOD);
    let ctx = local_mean_at_center(data, &direction, m)?;

    let y_out = match args.what {
        TransformWhat::Response | TransformWhat::Both => transform_response(data, &ctx),
        TransformWhat::Predictors => data.y().clone(),
    };
    let x_out = match args.what {
        TransformWhat::Predictors | TransformWhat::Both => transform_predictors(data, &ctx),
        TransformWhat::Response => data.x().clone(),
    };
    write_dataset(
        create_out(&prefixed(&args.out, "transformed.csv"))?,
        &loaded.response_name,
        &loaded.predictor_names,
        &y_out,
        &x_out,
    )?;

    {
        let mut w = csv::Writer::from_writer(create_out(&prefixed(&args.out, "context.csv"))?);
        let mut header = vec![
            "center".to_string(),
            "local_mean".to_string(),
            "neighborhood".to_string(),
        ];
        for name in &loaded.predictor_names {
            header.push(format!("dir_{name}"));
        }
        w.write_record(&header)?;
        let mut row = vec![
            csv_io::fmt17(ctx.center),
            csv_io::fmt17(ctx.local_mean),
            ctx.m.to_string(),
        ];
        for j in 0..data.p() {
            row.push(csv_io::fmt17(ctx.direction.as_vector()[j]));
        }
        w.write_record(&row)?;
        w.into_inner()
            .map_err(|e| Error::InvalidInput(format!("flushing CSV output failed: {e}")))?;
    }
    eprintln!(
        "transform: folded {} of {} rows about center {:.6}",
        match args.what {
            TransformWhat::Response => "the response",
            TransformWhat::Predictors => "the predictors",
            TransformWhat::Both => "both sides",
        },
        data.n(),
        ctx.center
    );
    Ok(())
}
