//! Observed vs. structural autocorrelation: the estimator's percentage
//! error as a function of the *observed* lag-1 autocorrelation of demand,
//! sweeping the underlying structural coefficient.

use super::config::ExperimentConfig;
use super::table::{Cell, Table};
use super::{ExperimentError, ExperimentOutput, FigureStyle};
use crate::estimation::{catalogue, civ_estimate};
use crate::scm::{
    apply_intercepts, build_model, observed_autocorrelation, set_param, simulate, ModelKind,
    SimulationConfig, DEFAULT_MEAN_DEMAND,
};
use rayon::prelude::*;

/// Structural-coefficient sweep range per model.
fn coefficient_range(model: ModelKind) -> Result<(&'static str, f64, f64), ExperimentError> {
    match model {
        ModelKind::Model1 => Ok(("beta_d1", -0.25, 0.99)),
        ModelKind::Model2 => Ok(("beta_b1", -0.25, 0.99)),
        ModelKind::Model3 => Ok(("beta_p1", -250.0, 250.0)),
        other => Err(ExperimentError::UnsupportedModel(other.to_string())),
    }
}

pub fn run_observed_ar(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let (param, lo, hi) = coefficient_range(cfg.model)?;
    let label = cfg.estimator.clone().unwrap_or_else(|| "#1".to_string());
    let spec = catalogue(&label, cfg.lag_depth.max(1))?;

    let mut table = Table::new(&["draw", "coefficient", "observed_ar", "pct_error"]);
    if cfg.draws == 0 {
        let meta = serde_json::json!({
            "experiment": cfg.name.to_string(),
            "config": cfg,
            "estimator": label,
            "swept_parameter": param,
        });
        return Ok(ExperimentOutput { table, style: FigureStyle::Scatter, meta });
    }

    let coefficients: Vec<f64> = (0..cfg.draws)
        .map(|i| {
            if cfg.draws == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (cfg.draws - 1) as f64
            }
        })
        .collect();

    let rows: Result<Vec<(f64, f64, f64)>, ExperimentError> = coefficients
        .par_iter()
        .enumerate()
        .map(|(i, &coef)| {
            let mut p = super::config::resolved_params(cfg)?;
            set_param(&mut p, param, &format!("{coef}"))?;
            apply_intercepts(cfg.model, &mut p, DEFAULT_MEAN_DEMAND, 0.5);
            let truth = p.beta_p;
            let (sim_spec, _) = build_model(cfg.model, p)?;
            let sim = simulate(&sim_spec, &SimulationConfig::new(cfg.t_len, cfg.seed_base + i as u64))?;
            let alpha = observed_autocorrelation(sim.data.column("D").unwrap(), 1)?;
            let est = civ_estimate(&sim.data, &spec)?;
            let pct = 100.0 * (est.beta_hat[0] - truth) / truth.abs();
            Ok((coef, alpha, pct))
        })
        .collect();
    for (i, (coef, alpha, pct)) in rows?.into_iter().enumerate() {
        table.push(vec![
            Cell::Int(i as i64),
            Cell::Num(coef),
            Cell::Num(alpha),
            Cell::Num(pct),
        ]);
    }

    let meta = serde_json::json!({
        "experiment": cfg.name.to_string(),
        "config": cfg,
        "estimator": label,
        "swept_parameter": param,
        "sweep_range": [lo, hi],
    });
    Ok(ExperimentOutput { table, style: FigureStyle::Scatter, meta })
}
