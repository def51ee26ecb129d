//! Log-log specification: elasticities instead of MW-per-EUR slopes.

use super::EstimationError;
use crate::scm::TimeSeriesDataset;

/// Replace the price and demand columns by their natural logs. Rows with
/// non-positive prices (or demand) get a non-finite marker there and are
/// excluded when designs are built, which keeps lagged references aligned to
/// the original time grid. Returns the transformed dataset and the number of
/// marked price rows.
pub fn loglog_transform(ds: &TimeSeriesDataset) -> Result<(TimeSeriesDataset, usize), EstimationError> {
    let price = ds
        .column("P")
        .map_err(|_| EstimationError::MissingColumn("P".into()))?;
    let demand = ds
        .column("D")
        .map_err(|_| EstimationError::MissingColumn("D".into()))?;
    let mut dropped = 0usize;
    let log_p: Vec<f64> = price
        .iter()
        .map(|&v| {
            if v > 0.0 {
                v.ln()
            } else {
                dropped += 1;
                f64::NAN
            }
        })
        .collect();
    let log_d: Vec<f64> = demand
        .iter()
        .map(|&v| if v > 0.0 { v.ln() } else { f64::NAN })
        .collect();
    if log_p.iter().all(|v| !v.is_finite()) {
        return Err(EstimationError::AllRowsDropped);
    }
    let out = ds
        .with_column("P", log_p)
        .and_then(|d| d.with_column("D", log_d))
        .expect("column replacement preserves length");
    Ok((out, dropped))
}
