//! CSV ingestion and serialization. All numeric output uses 17
//! significant digits so values round-trip exactly.

use crate::data::{DataSet, DirectionSet};
use crate::error::{Error, Result};
use crate::simulation::{ReplicationRecord, TableReport};

use nalgebra::{DMatrix, DVector};
use std::io::Write;
use std::path::Path;

/// Formats a float with 17 significant digits (round-trip safe).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Which column of an input CSV holds the response.
#[derive(Debug, Clone)]
pub enum ResponseSelector {
    /// Match a header name exactly.
    Name(String),
    /// 1-based column position.
    Index(usize),
}

impl ResponseSelector {
    /// Parses a CLI argument: a header name, or a 1-based column
    /// number when the text is numeric.
    pub fn parse(arg: &str) -> Self {
        match arg.parse::<usize>() {
            Ok(i) => ResponseSelector::Index(i),
            Err(_) => ResponseSelector::Name(arg.to_string()),
        }
    }

    fn resolve(&self, headers: &[String]) -> Result<usize> {
        match self {
            ResponseSelector::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "response column '{name}' not found; available: {}",
                        headers.join(", ")
                    ))
                }),
            ResponseSelector::Index(i) => {
                if *i >= 1 && *i <= headers.len() {
                    Ok(i - 1)
                } else {
                    Err(Error::InvalidInput(format!(
                        "response column {i} out of range 1..={}",
                        headers.len()
                    )))
                }
            }
        }
    }
}

/// A dataset read from CSV, with its column names.
#[derive(Debug, Clone)]
pub struct LoadedCsv {
    /// Parsed observations.
    pub dataset: DataSet,
    /// Header of the response column.
    pub response_name: String,
    /// Headers of the predictor columns, in file order.
    pub predictor_names: Vec<String>,
}

/// Reads a headed CSV of numbers into a dataset.
///
/// Every cell must parse as a finite number; a bad cell is reported
/// with its 1-based line and column (the header is line 1).
pub fn load_csv(path: &Path, response: &ResponseSelector) -> Result<LoadedCsv> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            column: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if headers.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two columns (response and one predictor)".into(),
        ));
    }
    let resp_idx = response.resolve(&headers)?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (rec_idx, record) in reader.records().enumerate() {
        let line = rec_idx + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            column: 1,
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line,
                column: record.len().min(headers.len()),
                message: format!(
                    "expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            });
        }
        let mut row = Vec::with_capacity(headers.len());
        for (col_idx, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: col_idx + 1,
                message: if field.is_empty() {
                    format!("empty cell in column '{}'", headers[col_idx])
                } else {
                    format!("'{field}' is not a number (column '{}')", headers[col_idx])
                },
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: col_idx + 1,
                    message: format!("non-finite value in column '{}'", headers[col_idx]),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    let n = rows.len();
    let p = headers.len() - 1;
    let mut y = DVector::zeros(n);
    let mut x = DMatrix::zeros(n, p);
    for (i, row) in rows.iter().enumerate() {
        y[i] = row[resp_idx];
        let mut k = 0;
        for (j, v) in row.iter().enumerate() {
            if j != resp_idx {
                x[(i, k)] = *v;
                k += 1;
            }
        }
    }
    let predictor_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != resp_idx)
        .map(|(_, h)| h.clone())
        .collect();
    Ok(LoadedCsv {
        dataset: DataSet::new(y, x)?,
        response_name: headers[resp_idx].clone(),
        predictor_names,
    })
}

/// Reads directions from a CSV written by [`write_directions`]:
/// first column names the predictor, remaining columns are direction
/// coefficients.
pub fn load_directions_csv(path: &Path) -> Result<Vec<DVector<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
    let width = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            column: 1,
            message: e.to_string(),
        })?
        .len();
    if width < 2 {
        return Err(Error::InvalidInput(
            "a direction file needs a name column and at least one coefficient column".into(),
        ));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width - 1];
    for (rec_idx, record) in reader.records().enumerate() {
        let line = rec_idx + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            column: 1,
            message: e.to_string(),
        })?;
        for k in 1..width {
            let field = record.get(k).unwrap_or("");
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: k + 1,
                message: format!("'{field}' is not a number"),
            })?;
            columns[k - 1].push(value);
        }
    }
    if columns[0].is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(columns.into_iter().map(DVector::from_vec).collect())
}

fn finish<W: Write>(writer: csv::Writer<W>) -> Result<()> {
    writer.into_inner().map_err(|e| {
        Error::InvalidInput(format!("flushing CSV output failed: {e}"))
    })?;
    Ok(())
}

/// Writes a simulation report (one row per cell).
pub fn write_table<W: Write>(out: W, report: &TableReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "n",
        "p",
        "metric1_mean",
        "metric1_sd",
        "metric2_mean",
        "metric2_sd",
        "replications",
        "failures",
    ])?;
    for row in &report.rows {
        let m2_mean = row.metric_means.get(1).map(|v| fmt17(*v)).unwrap_or_default();
        let m2_sd = row.metric_sds.get(1).map(|v| fmt17(*v)).unwrap_or_default();
        w.write_record([
            row.method.clone(),
            row.n.to_string(),
            row.p.to_string(),
            fmt17(row.metric_means[0]),
            fmt17(row.metric_sds[0]),
            m2_mean,
            m2_sd,
            row.replications.to_string(),
            row.failures.to_string(),
        ])?;
    }
    finish(w)
}

/// Writes the per-replication score log for one or more cells.
pub fn write_scores<W: Write>(
    out: W,
    cells: &[(String, usize, usize, Vec<ReplicationRecord>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "n",
        "p",
        "replication",
        "metric1",
        "metric2",
        "status",
        "message",
    ])?;
    for (method, n, p, records) in cells {
        for r in records {
            let (m1, m2, status, message) = match &r.scores {
                Some(s) => (
                    fmt17(s[0]),
                    s.get(1).map(|v| fmt17(*v)).unwrap_or_default(),
                    "ok".to_string(),
                    String::new(),
                ),
                None => (
                    String::new(),
                    String::new(),
                    "failed".to_string(),
                    r.message.clone().unwrap_or_default(),
                ),
            };
            w.write_record([
                method.clone(),
                n.to_string(),
                p.to_string(),
                r.replication.to_string(),
                m1,
                m2,
                status,
                message,
            ])?;
        }
    }
    finish(w)
}

/// Writes estimated directions, one row per predictor.
pub fn write_directions<W: Write>(
    out: W,
    predictor_names: &[String],
    set: &DirectionSet,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["predictor".to_string()];
    for k in 1..=set.len() {
        header.push(format!("dir_{k}"));
    }
    w.write_record(&header)?;
    for (j, name) in predictor_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for d in &set.directions {
            row.push(fmt17(d.as_vector()[j]));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// Writes summary-plot coordinates: each direction's projection plus
/// the working response, one row per observation.
pub fn write_essp<W: Write>(
    out: W,
    projections: &DMatrix<f64>,
    response_name: &str,
    y: &DVector<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=projections.ncols())
        .map(|k| format!("proj_{k}"))
        .collect();
    header.push(response_name.to_string());
    w.write_record(&header)?;
    for i in 0..projections.nrows() {
        let mut row: Vec<String> = (0..projections.ncols())
            .map(|k| fmt17(projections[(i, k)]))
            .collect();
        row.push(fmt17(y[i]));
        w.write_record(&row)?;
    }
    finish(w)
}

/// Writes a dataset (response first, predictors after) as CSV.
pub fn write_dataset<W: Write>(
    out: W,
    response_name: &str,
    predictor_names: &[String],
    y: &DVector<f64>,
    x: &DMatrix<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![response_name.to_string()];
    header.extend(predictor_names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..x.nrows() {
        let mut row = vec![fmt17(y[i])];
        for j in 0..x.ncols() {
            row.push(fmt17(x[(i, j)]));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// Writes two paired coordinate columns (residual/fitted plots,
/// normal-quantile plots, and the like).
pub fn write_pairs<W: Write>(
    out: W,
    names: (&str, &str),
    a: &DVector<f64>,
    b: &DVector<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([names.0, names.1])?;
    for i in 0..a.len() {
        w.write_record([fmt17(a[i]), fmt17(b[i])])?;
    }
    finish(w)
}
