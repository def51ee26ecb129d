//! Schema-validated CSV ingestion.

use super::schema::MarketSchema;
use super::DatasetError;
use crate::scm::TimeSeriesDataset;
use chrono::{NaiveDateTime, TimeDelta};
use std::path::Path;

/// What to do with repeated wall-clock stamps (daylight-saving fall-back
/// produces them in local-time data).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Reject the file.
    #[default]
    Error,
    /// Keep the first occurrence, drop the rest, and report the count.
    DropAndCount,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub on_duplicate: DuplicatePolicy,
    /// Keep only rows within [from, to) when set.
    pub date_range: Option<(NaiveDateTime, NaiveDateTime)>,
}

/// A loaded dataset plus ingestion diagnostics.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub dataset: TimeSeriesDataset,
    pub dropped_duplicates: usize,
    /// Hours skipped by forward gaps (missing stamps, e.g. daylight-saving
    /// spring-forward or pre-filtered rows).
    pub gap_hours: usize,
}

fn parse_stamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S"))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M"))
        .ok()
}

/// Load an hourly market CSV. The load/price/wind columns are renamed to
/// D/P/W; every other numeric column keeps its header name.
pub fn load_csv(
    path: &Path,
    schema: &MarketSchema,
    opts: &LoadOptions,
) -> Result<LoadReport, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DatasetError::Io(std::io::Error::other(e.to_string())))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| DatasetError::Io(std::io::Error::other(e.to_string())))?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let mut missing = Vec::new();
    for required in [
        &schema.timestamp_column,
        &schema.load_column,
        &schema.price_column,
        &schema.wind_column,
    ] {
        if !headers.contains(required) {
            missing.push(required.clone());
        }
    }
    if !missing.is_empty() {
        return Err(DatasetError::MissingColumns(missing));
    }
    let ts_idx = headers.iter().position(|h| *h == schema.timestamp_column).unwrap();

    let mut stamps: Vec<NaiveDateTime> = Vec::new();
    let mut columns: Vec<Vec<f64>> = headers.iter().map(|_| Vec::new()).collect();
    let mut dropped_duplicates = 0usize;
    let mut gap_hours = 0usize;

    for (line, record) in rdr.records().enumerate() {
        let row = line + 2;
        let record = record.map_err(|e| DatasetError::Io(std::io::Error::other(e.to_string())))?;
        let raw_ts = record.get(ts_idx).unwrap_or("");
        let stamp = parse_stamp(raw_ts).ok_or_else(|| DatasetError::Unparseable {
            row,
            column: schema.timestamp_column.clone(),
            value: raw_ts.to_string(),
        })?;
        if let Some((from, to)) = opts.date_range {
            if stamp < from || stamp >= to {
                continue;
            }
        }
        if let Some(&last) = stamps.last() {
            let delta = stamp - last;
            if delta == TimeDelta::zero() {
                match opts.on_duplicate {
                    DuplicatePolicy::Error => {
                        return Err(DatasetError::DuplicateTimestamp(stamp.to_string()))
                    }
                    DuplicatePolicy::DropAndCount => {
                        dropped_duplicates += 1;
                        continue;
                    }
                }
            } else if delta < TimeDelta::zero() {
                return Err(DatasetError::NonMonotonicTimestamp(stamp.to_string()));
            } else if delta < TimeDelta::hours(1) {
                return Err(DatasetError::SubHourlySpacing(stamp.to_string()));
            } else if delta > TimeDelta::hours(1) {
                gap_hours += (delta.num_hours() - 1) as usize;
            }
        }
        stamps.push(stamp);
        for (i, field) in record.iter().enumerate() {
            if i == ts_idx {
                continue;
            }
            let v: f64 = if field.is_empty() {
                f64::NAN
            } else {
                field.parse().map_err(|_| DatasetError::Unparseable {
                    row,
                    column: headers[i].clone(),
                    value: field.to_string(),
                })?
            };
            columns[i].push(v);
        }
    }
    if stamps.is_empty() {
        return Err(DatasetError::EmptyFile);
    }

    let mut named: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, header) in headers.iter().enumerate() {
        if i == ts_idx {
            continue;
        }
        let name = if *header == schema.load_column {
            "D".to_string()
        } else if *header == schema.price_column {
            "P".to_string()
        } else if *header == schema.wind_column {
            "W".to_string()
        } else {
            header.clone()
        };
        named.push((name, std::mem::take(&mut columns[i])));
    }
    let dataset = TimeSeriesDataset::new(named)?.with_timestamps(stamps)?;
    Ok(LoadReport { dataset, dropped_duplicates, gap_hours })
}
