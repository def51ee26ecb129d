//! The application pipeline: covariates, lag materialization, split, the
//! estimator battery with covariate conditioning, and the overlap report.

use super::covariates::{build_covariates, CovariateOptions};
use super::lags::{lag_column_name, lags_then_split, SplitRule};
use super::DatasetError;
use crate::estimation::{
    catalogue, civ_estimate_with, loglog_transform, overlap_analysis, CivOptions, EstimateResult,
    EstimatorSpec, LaggedRef, OverlapReport, ValidityMatrix,
};
use crate::experiments::{Cell, Table};
use crate::scm::TimeSeriesDataset;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpecKind {
    #[default]
    Linear,
    LogLog,
}

impl std::str::FromStr for SpecKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(SpecKind::Linear),
            "loglog" | "log-log" => Ok(SpecKind::LogLog),
            other => Err(format!("unknown spec `{other}`; expected linear or loglog")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApplicationConfig {
    pub estimators: Vec<String>,
    pub lag_depth: u32,
    pub spec_kind: SpecKind,
    pub split: SplitRule,
    pub hac_bandwidth: Option<usize>,
    /// `None` builds the default calendar set plus every known covariate
    /// column present in the data.
    pub covariates: Option<CovariateOptions>,
}

impl Default for ApplicationConfig {
    fn default() -> Self {
        Self {
            estimators: crate::estimation::CATALOGUE_LABELS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            lag_depth: 50,
            spec_kind: SpecKind::Linear,
            split: SplitRule::All,
            hac_bandwidth: None,
            covariates: None,
        }
    }
}

/// First-stage digest of the benchmark estimator: the loading of the
/// contemporaneous instrument on the price, the residual-instrument standard
/// deviation, and the predicted price change per one-sd supply shift.
#[derive(Debug, Clone, Serialize)]
pub struct FirstStageSummary {
    pub pi: f64,
    pub resid_instrument_sd: f64,
    pub predicted_price_change_per_sd: f64,
}

#[derive(Debug, Clone)]
pub struct ApplicationReport {
    pub split_label: String,
    pub estimates: Vec<EstimateResult>,
    pub overlap: OverlapReport,
    pub validity: ValidityMatrix,
    pub table: Table,
    pub first_stage: Option<FirstStageSummary>,
    pub rows_after_split: usize,
    /// Price rows masked by the log transform (when applicable).
    pub masked_price_rows: usize,
}

/// Rewrite a lag-k reference to the lag-0 reference of its materialized
/// column.
fn rewrite(r: &LaggedRef) -> LaggedRef {
    if r.lag == 0 {
        r.clone()
    } else {
        LaggedRef::new(&lag_column_name(&r.component, r.lag), 0)
    }
}

pub fn run_application(
    ds: &TimeSeriesDataset,
    cfg: &ApplicationConfig,
) -> Result<ApplicationReport, DatasetError> {
    if cfg.estimators.is_empty() {
        return Err(DatasetError::NoEstimators);
    }
    let specs: Result<Vec<EstimatorSpec>, _> = cfg
        .estimators
        .iter()
        .map(|l| catalogue(l, cfg.lag_depth))
        .collect();
    let specs = specs?;

    // Log transform marks non-positive prices before any lag is built, so
    // the markers flow into lagged columns at the right offsets.
    let (working, masked_price_rows) = match cfg.spec_kind {
        SpecKind::Linear => (ds.clone(), 0),
        SpecKind::LogLog => loglog_transform(ds)?,
    };

    let cov_opts = cfg
        .covariates
        .clone()
        .unwrap_or_else(|| CovariateOptions::default().with_available_continuous(ds));
    let covariates = build_covariates(&working, &cov_opts)?;

    // Attach covariates and the holiday keep flag as columns so every row
    // filter happens after lag construction, in one place.
    let mut staged = working.clone();
    for (name, col) in &covariates.columns {
        staged = staged.with_column(name, col.clone())?;
    }
    let keep_col: Vec<f64> = covariates
        .keep_rows
        .iter()
        .map(|&k| if k { 1.0 } else { f64::NAN })
        .collect();
    staged = staged.with_column("__keep", keep_col)?;

    // Union of lagged references across the battery.
    let lag_pairs: Vec<(String, u32)> = {
        let mut set = BTreeSet::new();
        for spec in &specs {
            for r in spec
                .instruments
                .iter()
                .chain(&spec.regressors)
                .chain(&spec.conditioning)
                .chain(std::iter::once(&spec.outcome))
            {
                if r.lag > 0 {
                    set.insert((r.component.clone(), r.lag));
                }
            }
        }
        set.into_iter().collect()
    };

    let mut parts = lags_then_split(&staged, &lag_pairs, cfg.split)?;
    let (split_label, split_ds) = parts.remove(0);

    // Holiday rows out (their keep flag is NaN, which would poison designs).
    let keep: Vec<bool> = split_ds
        .column("__keep")?
        .iter()
        .map(|v| v.is_finite())
        .collect();
    let final_ds = split_ds.filter_rows(&keep)?;
    let rows_after_split = final_ds.len();

    let cov_for_estimation: Vec<(String, Vec<f64>)> = covariates
        .columns
        .iter()
        .map(|(name, _)| Ok((name.clone(), final_ds.column(name)?.to_vec())))
        .collect::<Result<_, DatasetError>>()?;
    let opts = CivOptions { hac_bandwidth: cfg.hac_bandwidth, covariates: cov_for_estimation };

    let mut estimates = Vec::new();
    for spec in &specs {
        let rewritten = EstimatorSpec::new(
            &spec.label,
            spec.instruments.iter().map(rewrite).collect(),
            spec.regressors.iter().map(rewrite).collect(),
            spec.conditioning.iter().map(rewrite).collect(),
            rewrite(&spec.outcome),
        )?;
        estimates.push(civ_estimate_with(&final_ds, &rewritten, &opts)?);
    }

    let validity = ValidityMatrix::from_builtin_graphs(cfg.lag_depth.min(5).max(2))?;
    let overlap = overlap_analysis(&estimates, &validity)?;

    let mut table = Table::new(&[
        "estimator",
        "beta",
        "se",
        "ci_lo",
        "ci_hi",
        "n_used",
        "valid_model1",
        "valid_model2",
        "valid_model3",
    ]);
    for est in &estimates {
        let flags: Vec<bool> = validity
            .rows
            .iter()
            .find(|(l, _)| *l == est.label)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(|| vec![false; 3]);
        table.push(vec![
            Cell::Text(est.label.clone()),
            Cell::Num(est.beta_hat[0]),
            Cell::Num(est.se[0]),
            Cell::Num(est.ci[0].0),
            Cell::Num(est.ci[0].1),
            Cell::Int(est.n_used as i64),
            Cell::Bool(flags[0]),
            Cell::Bool(flags[1]),
            Cell::Bool(flags[2]),
        ]);
    }

    let first_stage = estimates
        .iter()
        .find(|e| e.label == "#2")
        .map(|e| {
            let pi = e.first_stage.coefficients[0][0];
            let sd = e.first_stage.resid_instrument_sd;
            FirstStageSummary {
                pi,
                resid_instrument_sd: sd,
                predicted_price_change_per_sd: pi * sd,
            }
        });

    Ok(ApplicationReport {
        split_label,
        estimates,
        overlap,
        validity,
        table,
        first_stage,
        rows_after_split,
        masked_price_rows,
    })
}
