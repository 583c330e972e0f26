//! CSV ingestion of returns tables.
//!
//! Layout: a header row of asset labels, then one row per period. The first
//! column holds period labels when its header is one of `date`, `period`,
//! `month`, `time`, `yyyymm` (any case) or empty, or when any of its cells
//! does not parse as a float. Otherwise every column is an asset.

use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::sharpe::ReturnsMatrix;

const LABEL_HEADERS: [&str; 5] = ["date", "period", "month", "time", "yyyymm"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnsUnit {
    /// 0.01 means 1%.
    Decimal,
    /// 1.0 means 1%; divided by 100 on load.
    Percent,
}

impl FromStr for ReturnsUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "decimal" => Ok(Self::Decimal),
            "percent" => Ok(Self::Percent),
            other => Err(Error::InvalidParameter(format!(
                "unknown returns unit '{other}' (expected decimal or percent)"
            ))),
        }
    }
}

pub fn load_returns_csv(path: impl AsRef<Path>, unit: ReturnsUnit) -> Result<ReturnsMatrix> {
    parse_returns_csv(File::open(path)?, unit)
}

/// Parses a returns table. Row numbers in errors are 1-based file lines
/// (the header is line 1); column numbers are 1-based.
pub fn parse_returns_csv<R: Read>(reader: R, unit: ReturnsUnit) -> Result<ReturnsMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row: i + 1,
            col: None,
            message: e.to_string(),
        })?;
        // skip blank lines
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        records.push((line, rec));
    }

    let Some((_, header)) = records.first() else {
        return Err(Error::InsufficientData("file is empty".into()));
    };
    let width = header.len();
    let rows = &records[1..];
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 data rows, got {}",
            rows.len()
        )));
    }
    for (line, rec) in rows {
        if rec.len() != width {
            return Err(Error::Parse {
                row: *line,
                col: None,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
    }

    let first = header.get(0).unwrap_or_default();
    let has_labels = first.is_empty()
        || LABEL_HEADERS.iter().any(|h| first.eq_ignore_ascii_case(h))
        || rows.iter().any(|(_, rec)| rec[0].parse::<f64>().is_err());
    let skip = usize::from(has_labels);
    if width <= skip {
        return Err(Error::InsufficientData("no asset columns".into()));
    }

    let divisor = match unit {
        ReturnsUnit::Decimal => 1.0,
        ReturnsUnit::Percent => 100.0,
    };
    let mut data = Vec::with_capacity(rows.len() * (width - skip));
    for (line, rec) in rows {
        for (j, cell) in rec.iter().enumerate().skip(skip) {
            let value = parse_cell(cell).ok_or_else(|| Error::Parse {
                row: *line,
                col: Some(j + 1),
                message: format!("'{cell}' is not a finite number"),
            })?;
            data.push(value / divisor);
        }
    }

    let asset_labels = header.iter().skip(skip).map(str::to_owned).collect();
    let period_labels = has_labels.then(|| rows.iter().map(|(_, r)| r[0].to_owned()).collect());
    let values = DenseMatrix::new(rows.len(), width - skip, data)?;
    ReturnsMatrix::new(values, asset_labels, period_labels)
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}
