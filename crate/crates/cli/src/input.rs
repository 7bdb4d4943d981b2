//! Distance-matrix files and tuple arguments.

use std::path::Path;

use cycl::metric::{CyclicTuple, FiniteMetric, MetricError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0} labels given for {1} points")]
    Labels(usize, usize),
    #[error("invalid metric: {0}")]
    Metric(#[from] MetricError),
    #[error("invalid tuple {0:?}: {1}")]
    Tuple(String, String),
}

/// The JSON matrix format; also what `gen` and `snowflake` write.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub matrix: Vec<Vec<f64>>,
    /// Embedded coordinates of sampled points, written by `gen`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 3]>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMetric {
    pub labels: Option<Vec<String>>,
    pub metric: FiniteMetric,
}

/// Reads a distance matrix from CSV (a line holding `n`, then `n` rows of
/// `n` comma-separated decimals) or JSON (`{"labels": [...], "matrix":
/// [[...]]}`), and validates it.
pub fn parse_matrix(path: &Path) -> Result<LabeledMetric, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_str(&text)
}

pub fn parse_matrix_str(text: &str) -> Result<LabeledMetric, InputError> {
    if text.trim_start().starts_with('{') {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
        if let Some(labels) = &file.labels {
            if labels.len() != file.matrix.len() {
                return Err(InputError::Labels(labels.len(), file.matrix.len()));
            }
        }
        Ok(LabeledMetric {
            labels: file.labels,
            metric: FiniteMetric::new(file.matrix)?,
        })
    } else {
        Ok(LabeledMetric {
            labels: None,
            metric: FiniteMetric::new(parse_csv(text)?)?,
        })
    }
}

fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let line = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line());
    let first = records
        .next()
        .ok_or_else(|| InputError::Csv("empty file".into()))?
        .map_err(|e| InputError::Csv(e.to_string()))?;
    let n: usize = match first.iter().collect::<Vec<_>>().as_slice() {
        [n] => n
            .parse()
            .map_err(|_| InputError::Csv(format!("line 1: expected the point count, got {n:?}")))?,
        _ => return Err(InputError::Csv("line 1: expected a single point count".into())),
    };
    let mut rows = Vec::with_capacity(n);
    for record in records {
        let record = record.map_err(|e| InputError::Csv(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v.parse::<f64>()
                    .map_err(|_| InputError::Csv(format!("line {}, column {}: {v:?} is not a number", line(&record), j + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(InputError::Csv(format!(
                "line {}: {} entries, expected {n}",
                line(&record),
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(InputError::Csv(format!("{} rows, expected {n}", rows.len())));
    }
    Ok(rows)
}

/// Parses `"0,1,2"` into a tuple over `n` points; `None` means the
/// identity tuple.
pub fn parse_tuple(arg: Option<&str>, n: usize) -> Result<CyclicTuple, InputError> {
    let Some(s) = arg else {
        return Ok(CyclicTuple::identity(n));
    };
    let indices = s
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| InputError::Tuple(s.to_string(), e.to_string()))?;
    CyclicTuple::new(indices, n).map_err(|e| InputError::Tuple(s.to_string(), e.to_string()))
}

/// CSV form of a matrix, as read by [`parse_matrix`].
pub fn to_csv(m: &FiniteMetric) -> String {
    let mut out = format!("{}\n", m.len());
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
