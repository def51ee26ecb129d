//! Lag-aligned design matrices.

use super::{EstimationError, EstimatorSpec};
use crate::scm::TimeSeriesDataset;
use nalgebra::{DMatrix, DVector};

/// Aligned matrices for one estimation problem. Row r corresponds to time
/// t = r + max_lag of the source table (before any NaN-row filtering), so a
/// lag-k reference in row r reads the value at t - k.
#[derive(Debug, Clone)]
pub struct Design {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub instruments: DMatrix<f64>,
    pub conditioning: DMatrix<f64>,
    pub x_names: Vec<String>,
    pub instrument_names: Vec<String>,
    pub conditioning_names: Vec<String>,
    pub n_used: usize,
    /// Rows dropped because some referenced cell was not finite.
    pub rows_masked: usize,
}

/// Build the design for `spec` on `ds`. Rows containing non-finite values in
/// any referenced cell (for example log-prices at non-positive prices) are
/// dropped after lag alignment, so lagged references never skip over removed
/// rows.
pub fn build_design(ds: &TimeSeriesDataset, spec: &EstimatorSpec) -> Result<Design, EstimationError> {
    build_design_with(ds, spec, &[])
}

/// `build_design` with extra lag-0 conditioning columns (covariates), each
/// aligned to the full dataset rows.
pub fn build_design_with(
    ds: &TimeSeriesDataset,
    spec: &EstimatorSpec,
    covariates: &[(String, Vec<f64>)],
) -> Result<Design, EstimationError> {
    let max_lag = spec.max_lag();
    let t_len = ds.len();
    if t_len <= max_lag as usize {
        return Err(EstimationError::InsufficientLength { rows: t_len, lag: max_lag });
    }
    for (name, col) in covariates {
        if col.len() != t_len {
            return Err(EstimationError::MissingColumn(format!(
                "covariate `{name}` has {} rows, dataset has {t_len}",
                col.len()
            )));
        }
    }
    let n_full = t_len - max_lag as usize;

    let col = |name: &str| -> Result<&[f64], EstimationError> {
        ds.column(name)
            .map_err(|_| EstimationError::MissingColumn(name.to_string()))
    };

    // Gather (name, source slice, lag) for each block.
    let fetch = |refs: &[super::LaggedRef]| -> Result<Vec<(String, &[f64], u32)>, EstimationError> {
        refs.iter()
            .map(|r| Ok((r.to_string(), col(&r.component)?, r.lag)))
            .collect()
    };
    let y_src = fetch(std::slice::from_ref(&spec.outcome))?;
    let x_src = fetch(&spec.regressors)?;
    let i_src = fetch(&spec.instruments)?;
    let mut b_src = fetch(&spec.conditioning)?;
    for (name, colv) in covariates {
        b_src.push((name.clone(), colv.as_slice(), 0));
    }

    // Keep rows where every referenced cell is finite.
    let mut keep = vec![true; n_full];
    for (_, src, lag) in y_src.iter().chain(&x_src).chain(&i_src).chain(&b_src) {
        for (r, k) in keep.iter_mut().enumerate() {
            let t = r + max_lag as usize;
            if !src[t - *lag as usize].is_finite() {
                *k = false;
            }
        }
    }
    let n_used = keep.iter().filter(|&&k| k).count();
    if n_used == 0 {
        return Err(EstimationError::NoUsableRows);
    }

    let build = |src: &[(String, &[f64], u32)]| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n_used, src.len());
        for (j, (_, colv, lag)) in src.iter().enumerate() {
            let mut out_r = 0;
            for (r, k) in keep.iter().enumerate() {
                if *k {
                    let t = r + max_lag as usize;
                    m[(out_r, j)] = colv[t - *lag as usize];
                    out_r += 1;
                }
            }
        }
        m
    };

    let y_m = build(&y_src);
    Ok(Design {
        y: DVector::from_column_slice(y_m.column(0).as_slice()),
        x: build(&x_src),
        instruments: build(&i_src),
        conditioning: build(&b_src),
        x_names: x_src.iter().map(|(n, _, _)| n.clone()).collect(),
        instrument_names: i_src.iter().map(|(n, _, _)| n.clone()).collect(),
        conditioning_names: b_src.iter().map(|(n, _, _)| n.clone()).collect(),
        n_used,
        rows_masked: n_full - n_used,
    })
}
