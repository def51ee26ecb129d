//! Bias heatmap: average absolute percentage error of an invalid estimator
//! over a grid of instrument and demand autocorrelation coefficients.

use super::config::ExperimentConfig;
use super::table::{Cell, Table};
use super::{ExperimentError, ExperimentOutput, FigureStyle};
use crate::estimation::{catalogue, civ_estimate};
use crate::scm::{
    apply_intercepts, build_model, innovation_sd_for, set_param, simulate, ModelKind,
    SimulationConfig, DEFAULT_MEAN_DEMAND, DEFAULT_WIND_MEAN, DEFAULT_WIND_SD,
};
use rayon::prelude::*;

/// Evenly spaced autocorrelation coefficients over [0, 0.9].
fn axis(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| 0.9 * i as f64 / (n - 1) as f64).collect()
}

pub fn run_bias_heatmap(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    if cfg.grid_size == 0 {
        return Err(ExperimentError::EmptyGrid);
    }
    if cfg.replicates == 0 {
        return Err(ExperimentError::ZeroReplicates);
    }
    let (demand_param, default_estimator) = match cfg.model {
        ModelKind::Model1 => ("beta_d1", "#1"),
        ModelKind::Model2 => ("beta_b1", "#3"),
        other => return Err(ExperimentError::UnsupportedModel(other.to_string())),
    };
    let label = cfg.estimator.clone().unwrap_or_else(|| default_estimator.to_string());
    let spec = catalogue(&label, cfg.lag_depth.max(1))?;

    let values = axis(cfg.grid_size);
    let cells: Vec<(f64, f64)> = values
        .iter()
        .flat_map(|&phi| values.iter().map(move |&rho| (phi, rho)))
        .collect();

    // Wind keeps its stationary scale across the instrument-autocorrelation
    // axis so cells differ only in memory, not in instrument strength.
    let errors: Result<Vec<Vec<f64>>, ExperimentError> = cells
        .par_iter()
        .map(|&(phi, rho)| {
            let mut p = super::config::resolved_params(cfg)?;
            p.wind_ar = vec![phi];
            p.sigma_w = innovation_sd_for(&p.wind_ar, DEFAULT_WIND_SD);
            p.wind_intercept = DEFAULT_WIND_MEAN * (1.0 - phi);
            set_param(&mut p, demand_param, &format!("{rho}"))?;
            apply_intercepts(cfg.model, &mut p, DEFAULT_MEAN_DEMAND, 0.5);
            let truth = p.beta_p;
            let (sim_spec, _) = build_model(cfg.model, p)?;
            let mut cell_errors = Vec::with_capacity(cfg.replicates);
            for r in 0..cfg.replicates {
                let sim =
                    simulate(&sim_spec, &SimulationConfig::new(cfg.t_len, cfg.seed_base + r as u64))?;
                let est = civ_estimate(&sim.data, &spec)?;
                cell_errors.push(100.0 * (est.beta_hat[0] - truth).abs() / truth.abs());
            }
            Ok(cell_errors)
        })
        .collect();
    let errors = errors?;

    let mut table = Table::new(&["wind_ar", "demand_ar", "mean_abs_pct_error", "replicates"]);
    for ((phi, rho), errs) in cells.iter().zip(&errors) {
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        table.push(vec![
            Cell::Num(*phi),
            Cell::Num(*rho),
            Cell::Num(mean),
            Cell::Int(cfg.replicates as i64),
        ]);
    }
    let meta = serde_json::json!({
        "experiment": cfg.name.to_string(),
        "config": cfg,
        "estimator": label,
        "demand_axis_parameter": demand_param,
        "axis_values": values,
        "stationary_wind_sd": DEFAULT_WIND_SD,
    });
    Ok(ExperimentOutput { table, style: FigureStyle::Heatmap, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentName, Preset};

    #[test]
    fn tiny_heatmap_has_clean_axes_and_biased_corner() {
        let mut cfg = ExperimentConfig::preset(
            ExperimentName::BiasHeatmap,
            Preset::Desk,
            ModelKind::Model1,
        );
        cfg.grid_size = 2; // values {0, 0.9}
        cfg.replicates = 2;
        cfg.t_len = 6_000;
        let out = run_bias_heatmap(&cfg).unwrap();
        assert_eq!(out.table.rows.len(), 4);
        let get = |phi: f64, rho: f64| -> f64 {
            out.table
                .rows
                .iter()
                .find(|r| r[0].as_f64() == phi && r[1].as_f64() == rho)
                .map(|r| r[2].as_f64())
                .unwrap()
        };
        assert!(get(0.0, 0.9) < 5.0, "iid instrument row should be clean");
        assert!(get(0.9, 0.0) < 5.0, "no-autocorrelation column should be clean");
        assert!(get(0.9, 0.9) > 50.0, "high-memory corner should be badly biased");
    }

    #[test]
    fn grid_and_replicates_validated() {
        let mut cfg = ExperimentConfig::preset(
            ExperimentName::BiasHeatmap,
            Preset::Desk,
            ModelKind::Model1,
        );
        cfg.grid_size = 0;
        assert!(matches!(run_bias_heatmap(&cfg), Err(ExperimentError::EmptyGrid)));
        cfg.grid_size = 2;
        cfg.replicates = 0;
        assert!(matches!(run_bias_heatmap(&cfg), Err(ExperimentError::ZeroReplicates)));
    }

    #[test]
    fn model3_not_a_heatmap_axis() {
        let cfg = ExperimentConfig::preset(
            ExperimentName::BiasHeatmap,
            Preset::Desk,
            ModelKind::Model3,
        );
        assert!(matches!(run_bias_heatmap(&cfg), Err(ExperimentError::UnsupportedModel(_))));
    }
}
