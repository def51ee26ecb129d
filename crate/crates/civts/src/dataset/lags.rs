//! Lag materialization before row splits.
//!
//! Lagged columns are computed on the full series first and the split is
//! applied afterwards, so a retained row's lag columns may reference hours
//! that the split removed (an on-peak row can look back into off-peak
//! hours). Splitting first would silently re-wire the lags.

use super::DatasetError;
use crate::scm::TimeSeriesDataset;
use chrono::Timelike;

/// Row filters applied after lag construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRule {
    #[default]
    All,
    /// 8:00 through 19:59.
    OnPeak,
    /// 20:00 through 7:59.
    OffPeak,
}

impl std::str::FromStr for SplitRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(SplitRule::All),
            "onpeak" | "on-peak" | "on_peak" => Ok(SplitRule::OnPeak),
            "offpeak" | "off-peak" | "off_peak" => Ok(SplitRule::OffPeak),
            other => Err(format!("unknown split `{other}`; expected onpeak, offpeak, or all")),
        }
    }
}

fn on_peak_hour(hour: u32) -> bool {
    (8..20).contains(&hour)
}

/// The canonical name of a materialized lag column.
pub fn lag_column_name(component: &str, lag: u32) -> String {
    format!("{component}_lag{lag}")
}

/// Materialize the requested `(column, lag)` pairs as new columns (the
/// first `lag` rows get a non-finite marker), then apply the split rule.
/// Returns the labeled parts the rule produces.
pub fn lags_then_split(
    ds: &TimeSeriesDataset,
    lag_spec: &[(String, u32)],
    rule: SplitRule,
) -> Result<Vec<(String, TimeSeriesDataset)>, DatasetError> {
    let mut out = ds.clone();
    for (name, lag) in lag_spec {
        if *lag == 0 {
            continue;
        }
        let src = out.column(name)?.to_vec();
        let mut shifted = vec![f64::NAN; src.len()];
        for t in *lag as usize..src.len() {
            shifted[t] = src[t - *lag as usize];
        }
        out = out.with_column(&lag_column_name(name, *lag), shifted)?;
    }

    let parts: Vec<(String, Vec<bool>)> = match rule {
        SplitRule::All => vec![("all".to_string(), vec![true; out.len()])],
        SplitRule::OnPeak | SplitRule::OffPeak => {
            let stamps = out.timestamps().ok_or(DatasetError::NoTimestamps)?;
            let mask: Vec<bool> = stamps.iter().map(|s| on_peak_hour(s.hour())).collect();
            match rule {
                SplitRule::OnPeak => vec![("onpeak".to_string(), mask)],
                _ => vec![("offpeak".to_string(), mask.iter().map(|m| !m).collect())],
            }
        }
    };
    parts
        .into_iter()
        .map(|(label, mask)| Ok((label, ds_filter(&out, &mask)?)))
        .collect()
}

fn ds_filter(ds: &TimeSeriesDataset, mask: &[bool]) -> Result<TimeSeriesDataset, DatasetError> {
    Ok(ds.filter_rows(mask)?)
}
