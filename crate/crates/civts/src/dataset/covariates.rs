//! Calendar and weather covariates.

use super::DatasetError;
use crate::scm::TimeSeriesDataset;
use chrono::{Datelike, Timelike};

/// Which covariates to build. Calendar one-hots drop one reference level
/// each: hour-of-week keeps 167 of 168 columns, month 11 of 12, year
/// (distinct years - 1). Levels absent from the data are skipped so no
/// column is all-zero.
#[derive(Debug, Clone)]
pub struct CovariateOptions {
    pub hour_of_week: bool,
    pub month_of_year: bool,
    pub year: bool,
    /// Continuous columns passed through from the dataset.
    pub continuous: Vec<String>,
    /// Drop rows whose holiday fraction reaches 1 (nation-wide holidays).
    pub drop_full_holidays: bool,
}

impl Default for CovariateOptions {
    fn default() -> Self {
        Self {
            hour_of_week: true,
            month_of_year: true,
            year: true,
            continuous: Vec::new(),
            drop_full_holidays: true,
        }
    }
}

impl CovariateOptions {
    /// Pass through every known optional covariate present in the dataset.
    pub fn with_available_continuous(mut self, ds: &TimeSeriesDataset) -> Self {
        for name in super::MarketSchema::KNOWN_COVARIATES {
            if name != "holiday_fraction" && ds.has_column(name) {
                self.continuous.push(name.to_string());
            }
        }
        // The holiday index itself stays a conditioning column where it is
        // fractional; full-holiday rows are dropped separately.
        if ds.has_column("holiday_fraction") {
            self.continuous.push("holiday_fraction".to_string());
        }
        self
    }
}

/// Covariate columns aligned to the dataset rows, plus the row-keep mask
/// from the holiday filter.
#[derive(Debug, Clone)]
pub struct CovariateSet {
    pub columns: Vec<(String, Vec<f64>)>,
    pub keep_rows: Vec<bool>,
}

pub fn build_covariates(
    ds: &TimeSeriesDataset,
    opts: &CovariateOptions,
) -> Result<CovariateSet, DatasetError> {
    let stamps = ds.timestamps().ok_or(DatasetError::NoTimestamps)?;
    let n = stamps.len();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();

    if opts.hour_of_week {
        let levels: Vec<usize> = (1..168).collect();
        let values: Vec<usize> = stamps
            .iter()
            .map(|s| s.weekday().num_days_from_monday() as usize * 24 + s.hour() as usize)
            .collect();
        for level in levels {
            if values.iter().any(|&v| v == level) {
                let col: Vec<f64> =
                    values.iter().map(|&v| if v == level { 1.0 } else { 0.0 }).collect();
                columns.push((format!("how_{level}"), col));
            }
        }
    }
    if opts.month_of_year {
        let values: Vec<u32> = stamps.iter().map(|s| s.month()).collect();
        for level in 2..=12u32 {
            if values.iter().any(|&v| v == level) {
                let col: Vec<f64> =
                    values.iter().map(|&v| if v == level { 1.0 } else { 0.0 }).collect();
                columns.push((format!("month_{level}"), col));
            }
        }
    }
    if opts.year {
        let mut years: Vec<i32> = stamps.iter().map(|s| s.year()).collect();
        let per_row = years.clone();
        years.sort_unstable();
        years.dedup();
        for level in years.iter().skip(1) {
            let col: Vec<f64> =
                per_row.iter().map(|&y| if y == *level { 1.0 } else { 0.0 }).collect();
            columns.push((format!("year_{level}"), col));
        }
    }
    for name in &opts.continuous {
        let col = ds
            .column(name)
            .map_err(|_| DatasetError::UnknownCovariate(name.clone()))?;
        columns.push((name.clone(), col.to_vec()));
    }

    let keep_rows = if opts.drop_full_holidays && ds.has_column("holiday_fraction") {
        ds.column("holiday_fraction")
            .unwrap()
            .iter()
            .map(|&h| h < 0.9999)
            .collect()
    } else {
        vec![true; n]
    };
    Ok(CovariateSet { columns, keep_rows })
}
