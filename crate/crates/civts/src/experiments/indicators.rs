//! Indicator curves over sample size: coverage of the 95% interval, average
//! absolute percentage error, and mean CI length for the robust estimators.

use super::config::ExperimentConfig;
use super::table::{Cell, Table};
use super::{ExperimentError, ExperimentOutput, FigureStyle};
use crate::estimation::{catalogue, civ_estimate};
use crate::scm::{build_model, simulate, SimulationConfig};
use rayon::prelude::*;

const HOURS_PER_YEAR: f64 = 8_760.0;

pub fn run_indicators(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    if cfg.sizes_years.is_empty() || cfg.estimators.is_empty() {
        return Err(ExperimentError::EmptyGrid);
    }
    if cfg.replicates == 0 {
        return Err(ExperimentError::ZeroReplicates);
    }
    let params = super::config::resolved_params(cfg)?;
    let truth = params.beta_p;
    let (sim_spec, _) = build_model(cfg.model, params.clone())?;
    let specs: Result<Vec<_>, _> = cfg
        .estimators
        .iter()
        .map(|l| catalogue(l, cfg.lag_depth))
        .collect();
    let specs = specs?;

    // One simulation per (size, replicate), shared by all estimators.
    let work: Vec<(usize, usize)> = (0..cfg.sizes_years.len())
        .flat_map(|s| (0..cfg.replicates).map(move |r| (s, r)))
        .collect();
    type RunRow = (usize, Vec<(bool, f64, f64)>);
    let runs: Result<Vec<RunRow>, ExperimentError> = work
        .par_iter()
        .map(|&(s, r)| {
            let t_len = (cfg.sizes_years[s] * HOURS_PER_YEAR).round() as usize;
            let sim =
                simulate(&sim_spec, &SimulationConfig::new(t_len, cfg.seed_base + r as u64))?;
            let mut per_estimator = Vec::with_capacity(specs.len());
            for spec in &specs {
                let est = civ_estimate(&sim.data, spec)?;
                let (lo, hi) = est.ci[0];
                per_estimator.push((
                    lo <= truth && truth <= hi,
                    100.0 * (est.beta_hat[0] - truth).abs() / truth.abs(),
                    hi - lo,
                ));
            }
            Ok((s, per_estimator))
        })
        .collect();
    let runs = runs?;

    let mut table = Table::new(&[
        "estimator",
        "years",
        "t_len",
        "coverage",
        "avg_abs_pct_error",
        "mean_ci_length",
        "replicates",
    ]);
    for (e, label) in cfg.estimators.iter().enumerate() {
        for (s, &years) in cfg.sizes_years.iter().enumerate() {
            let cell: Vec<&(bool, f64, f64)> = runs
                .iter()
                .filter(|(rs, _)| *rs == s)
                .map(|(_, per)| &per[e])
                .collect();
            let n = cell.len() as f64;
            let coverage = cell.iter().filter(|(c, _, _)| *c).count() as f64 / n;
            let err = cell.iter().map(|(_, e, _)| e).sum::<f64>() / n;
            let len = cell.iter().map(|(_, _, l)| l).sum::<f64>() / n;
            table.push(vec![
                Cell::Text(label.clone()),
                Cell::Num(years),
                Cell::Int((years * HOURS_PER_YEAR).round() as i64),
                Cell::Num(coverage),
                Cell::Num(err),
                Cell::Num(len),
                Cell::Int(cfg.replicates as i64),
            ]);
        }
    }
    let meta = serde_json::json!({
        "experiment": cfg.name.to_string(),
        "config": cfg,
        "params": params,
        "true_beta_p": truth,
    });
    Ok(ExperimentOutput { table, style: FigureStyle::IndicatorPanels, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentName, Preset};
    use crate::scm::ModelKind;

    #[test]
    fn single_replicate_coverage_is_zero_or_one() {
        let mut cfg =
            ExperimentConfig::preset(ExperimentName::Indicators, Preset::Desk, ModelKind::Model1);
        cfg.replicates = 1;
        cfg.sizes_years = vec![0.25];
        cfg.estimators = vec!["#2".into()];
        let out = run_indicators(&cfg).unwrap();
        let cov = out.table.numeric_column("coverage")[0];
        assert!(cov == 0.0 || cov == 1.0);
    }

    #[test]
    fn empty_sizes_rejected() {
        let mut cfg =
            ExperimentConfig::preset(ExperimentName::Indicators, Preset::Desk, ModelKind::Model1);
        cfg.sizes_years.clear();
        assert!(matches!(run_indicators(&cfg), Err(ExperimentError::EmptyGrid)));
    }

    #[test]
    fn small_run_produces_one_row_per_estimator_size() {
        let mut cfg =
            ExperimentConfig::preset(ExperimentName::Indicators, Preset::Desk, ModelKind::Model1);
        cfg.replicates = 3;
        cfg.sizes_years = vec![0.25, 0.5];
        cfg.estimators = vec!["#2".into(), "#8".into()];
        let out = run_indicators(&cfg).unwrap();
        assert_eq!(out.table.rows.len(), 4);
        for cov in out.table.numeric_column("coverage") {
            assert!((0.0..=1.0).contains(&cov));
        }
    }
}
