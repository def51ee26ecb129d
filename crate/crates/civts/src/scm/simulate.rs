//! Trajectory simulation of the equilibrium market models.
//!
//! Each step draws the structural disturbances, forms the demand and supply
//! sides without the price term, and solves the clearing condition for the
//! equilibrium price, so supply equals demand by construction at every t.

use super::params::{stationary_means, validate_params};
use super::{ModelKind, ModelParams, ScmError, TimeSeriesDataset};
use crate::graph::RolledTimeGraph;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A validated (kind, parameters) bundle ready to simulate.
#[derive(Debug, Clone)]
pub struct SimulatorSpec {
    kind: ModelKind,
    params: ModelParams,
}

impl SimulatorSpec {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

/// Validate parameters and return the simulator together with the rolled
/// graph implied by the nonzero coefficients.
pub fn build_model(
    kind: ModelKind,
    params: ModelParams,
) -> Result<(SimulatorSpec, RolledTimeGraph), ScmError> {
    validate_params(kind, &params)?;
    let graph = graph_for(kind, &params);
    Ok((SimulatorSpec { kind, params }, graph))
}

/// The marginalized rolled graph of the model: one edge per nonzero
/// structural coefficient, plus the price-demand confounding that the
/// clearing condition induces whenever the demand disturbance is live.
fn graph_for(kind: ModelKind, p: &ModelParams) -> RolledTimeGraph {
    use crate::graph::Component;
    let mut comps = vec![
        Component::observed("W"),
        Component::observed("P"),
        Component::observed("D"),
    ];
    if kind == ModelKind::Model2 {
        comps.push(Component::latent("B"));
    }
    let mut g = RolledTimeGraph::new(comps).expect("static components");
    for (i, &c) in p.wind_ar.iter().enumerate() {
        if c != 0.0 {
            g.add_directed("W", i as u32 + 1, "W").unwrap();
        }
    }
    if p.gamma_w != 0.0 {
        g.add_directed("W", 0, "P").unwrap();
    }
    let confounded = match kind {
        ModelKind::Model2 => p.sigma_a > 0.0 || p.sigma_b > 0.0,
        _ => p.sigma_d > 0.0,
    };
    match kind {
        ModelKind::Model2 => {
            if p.beta_b1 != 0.0 {
                g.add_directed("B", 1, "B").unwrap();
                g.add_directed("B", 1, "P").unwrap();
                g.add_directed("B", 1, "D").unwrap();
            }
            if p.beta_p != 0.0 {
                g.add_directed("P", 0, "D").unwrap();
            }
        }
        ModelKind::Model3 => {
            if p.beta_p1 != 0.0 {
                g.add_directed("P", 1, "P").unwrap();
                g.add_directed("P", 1, "D").unwrap();
            }
            if p.beta_p != 0.0 {
                g.add_directed("P", 0, "D").unwrap();
            }
        }
        _ => {
            if p.beta_d1 != 0.0 {
                g.add_directed("D", 1, "D").unwrap();
                g.add_directed("D", 1, "P").unwrap();
            }
            if p.beta_p != 0.0 {
                g.add_directed("P", 0, "D").unwrap();
            }
        }
    }
    if confounded {
        g.add_bidirected("P", 0, "D").unwrap();
    }
    g
}

/// Run-length, burn-in, and seeding for one trajectory.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Output sample length (hours).
    pub t_len: usize,
    /// Steps discarded before recording.
    pub burn_in: usize,
    pub seed: u64,
    /// Keep the latent Model 2 components A and B as dataset columns.
    pub keep_latent: bool,
    /// Optional exogenous additive shift of the demand intercept, one value
    /// per recorded step (used to plant covariate structure).
    pub demand_shift: Option<Vec<f64>>,
}

impl SimulationConfig {
    pub fn new(t_len: usize, seed: u64) -> Self {
        Self { t_len, burn_in: 2_000, seed, keep_latent: false, demand_shift: None }
    }
}

/// The disturbances drawn for the recorded steps.
#[derive(Debug, Clone)]
pub struct NoiseTrace {
    pub u_s: Vec<f64>,
    /// Combined demand disturbance (u_a + u_b for Model 2).
    pub u_d: Vec<f64>,
    pub u_w: Vec<f64>,
    pub u_a: Option<Vec<f64>>,
    pub u_b: Option<Vec<f64>>,
}

/// A simulated trajectory with its noise trace.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub data: TimeSeriesDataset,
    pub noise: NoiseTrace,
}

/// Simulate one trajectory. Deterministic given the seed; burn-in samples
/// are discarded; supply computed from the supply equation equals demand at
/// every recorded step.
pub fn simulate(spec: &SimulatorSpec, cfg: &SimulationConfig) -> Result<SimulationResult, ScmError> {
    if cfg.t_len == 0 {
        return Err(ScmError::EmptySample);
    }
    if let Some(shift) = &cfg.demand_shift {
        if shift.len() != cfg.t_len {
            return Err(ScmError::ShiftLengthMismatch { got: shift.len(), expected: cfg.t_len });
        }
    }
    let p = &spec.params;
    let kind = spec.kind;
    let means = stationary_means(kind, p)?;
    let b_mean = if kind == ModelKind::Model2 { p.b0 / (1.0 - p.beta_b1) } else { 0.0 };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |sigma: f64| -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        z * sigma
    };

    let total = cfg.burn_in + cfg.t_len;
    let ar_order = p.wind_ar.len();
    let mut wind_hist = vec![means.wind; ar_order.max(1)];
    let mut d_prev = means.demand;
    let mut p_prev = means.price;
    let mut b_prev = b_mean;

    let clearing = p.gamma_p - p.beta_p;

    let mut w_out = Vec::with_capacity(cfg.t_len);
    let mut p_out = Vec::with_capacity(cfg.t_len);
    let mut d_out = Vec::with_capacity(cfg.t_len);
    let mut a_out = Vec::new();
    let mut b_out = Vec::new();
    let mut u_s_out = Vec::with_capacity(cfg.t_len);
    let mut u_d_out = Vec::with_capacity(cfg.t_len);
    let mut u_w_out = Vec::with_capacity(cfg.t_len);
    let mut u_a_out = Vec::new();
    let mut u_b_out = Vec::new();

    for t in 0..total {
        let recorded = t >= cfg.burn_in;
        let shift = if recorded {
            cfg.demand_shift
                .as_ref()
                .map(|s| s[t - cfg.burn_in])
                .unwrap_or(0.0)
        } else {
            0.0
        };

        let u_w = draw(p.sigma_w);
        let mut w = p.wind_intercept + u_w;
        for (i, &c) in p.wind_ar.iter().enumerate() {
            w += c * wind_hist[i];
        }

        let u_s = draw(p.sigma_s);
        // Demand side without the price term, plus the per-model state update.
        let (dem_base, u_d, ab) = match kind {
            ModelKind::Model2 => {
                let u_a = draw(p.sigma_a);
                let u_b = draw(p.sigma_b);
                let b = p.b0 + p.beta_b1 * b_prev + u_b;
                let base = p.a0 + shift + u_a + b;
                (base, u_a + u_b, Some((u_a, u_b, b)))
            }
            ModelKind::Model3 => {
                let u_d = draw(p.sigma_d);
                (p.d0 + shift + p.beta_p1 * p_prev + u_d, u_d, None)
            }
            _ => {
                let u_d = draw(p.sigma_d);
                (p.d0 + shift + p.beta_d1 * d_prev + u_d, u_d, None)
            }
        };
        let sup_base = p.s0 + p.gamma_w * w + u_s;
        let price = (dem_base - sup_base) / clearing;
        let demand = dem_base + p.beta_p * price;

        if recorded {
            w_out.push(w);
            p_out.push(price);
            d_out.push(demand);
            u_s_out.push(u_s);
            u_d_out.push(u_d);
            u_w_out.push(u_w);
            if let Some((u_a, u_b, b)) = ab {
                u_a_out.push(u_a);
                u_b_out.push(u_b);
                b_out.push(b);
                a_out.push(demand - b);
            }
        } else if let Some((_, _, b)) = ab {
            let _ = b;
        }

        if ar_order > 0 {
            wind_hist.rotate_right(1);
            wind_hist[0] = w;
        }
        d_prev = demand;
        p_prev = price;
        if let Some((_, _, b)) = ab {
            b_prev = b;
        }
    }

    let mut columns = vec![
        ("W".to_string(), w_out),
        ("P".to_string(), p_out),
        ("D".to_string(), d_out),
    ];
    let is_model2 = kind == ModelKind::Model2;
    if is_model2 && cfg.keep_latent {
        columns.push(("A".to_string(), a_out));
        columns.push(("B".to_string(), b_out));
    }
    let data = TimeSeriesDataset::new(columns)?;
    data.require_finite()?;
    Ok(SimulationResult {
        data,
        noise: NoiseTrace {
            u_s: u_s_out,
            u_d: u_d_out,
            u_w: u_w_out,
            u_a: if is_model2 { Some(u_a_out) } else { None },
            u_b: if is_model2 { Some(u_b_out) } else { None },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin_graph, render_rolled_graph};
    use crate::scm::paper_defaults;
    use approx::assert_relative_eq;

    #[test]
    fn graph_matches_builtin_for_defaults() {
        for kind in [
            ModelKind::Model1,
            ModelKind::Model2,
            ModelKind::Model3,
            ModelKind::IidInstrument,
            ModelKind::NoDemandAutocorrelation,
            ModelKind::UnresponsiveDemand,
        ] {
            let (_, g) = build_model(kind, paper_defaults(kind)).unwrap();
            assert_eq!(
                render_rolled_graph(&g),
                render_rolled_graph(&builtin_graph(kind.builtin())),
                "graph mismatch for {kind:?}"
            );
        }
    }

    #[test]
    fn zero_demand_autocorrelation_degenerates_to_middle_special_case() {
        let mut p = paper_defaults(ModelKind::Model1);
        p.beta_d1 = 0.0;
        let (_, g) = build_model(ModelKind::Model1, p).unwrap();
        assert_eq!(
            render_rolled_graph(&g),
            render_rolled_graph(&builtin_graph(crate::graph::BuiltinModel::NoDemandAutocorrelation))
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let (spec, _) = build_model(ModelKind::Model1, paper_defaults(ModelKind::Model1)).unwrap();
        let cfg = SimulationConfig::new(500, 42);
        let a = simulate(&spec, &cfg).unwrap();
        let b = simulate(&spec, &cfg).unwrap();
        assert_eq!(a.data.column("D").unwrap(), b.data.column("D").unwrap());
        assert_eq!(a.noise.u_d, b.noise.u_d);
    }

    #[test]
    fn noiseless_constant_wind_sits_at_fixed_point() {
        let mut p = paper_defaults(ModelKind::Model1);
        p.sigma_s = 0.0;
        p.sigma_d = 0.0;
        p.sigma_w = 0.0;
        p.wind_ar = vec![];
        p.wind_intercept = 14_100.0;
        let means = stationary_means(ModelKind::Model1, &p).unwrap();
        let (spec, _) = build_model(ModelKind::Model1, p).unwrap();
        let out = simulate(&spec, &SimulationConfig::new(10, 1)).unwrap();
        for t in 0..10 {
            assert_relative_eq!(out.data.column("W").unwrap()[t], 14_100.0, epsilon = 1e-9);
            assert_relative_eq!(out.data.column("P").unwrap()[t], means.price, epsilon = 1e-9);
            assert_relative_eq!(out.data.column("D").unwrap()[t], means.demand, epsilon = 1e-9);
        }
    }

    /// Supply recomputed from the supply equation with the drawn shock must
    /// clear against demand at every step, for every model kind.
    #[test]
    fn market_clearing_holds_exactly() {
        for kind in [ModelKind::Model1, ModelKind::Model2, ModelKind::Model3] {
            let params = paper_defaults(kind);
            let (spec, _) = build_model(kind, params.clone()).unwrap();
            let out = simulate(&spec, &SimulationConfig::new(2_000, 7)).unwrap();
            let w = out.data.column("W").unwrap();
            let p = out.data.column("P").unwrap();
            let d = out.data.column("D").unwrap();
            for t in 0..d.len() {
                let s = params.s0 + params.gamma_p * p[t] + params.gamma_w * w[t] + out.noise.u_s[t];
                assert!(
                    (s - d[t]).abs() <= 1e-9 * d[t].abs(),
                    "clearing violated at t={t} for {kind:?}: s={s}, d={}",
                    d[t]
                );
            }
        }
    }

    /// The structural demand equation must reproduce the drawn disturbances.
    #[test]
    fn structural_residual_recovery() {
        // Model 1: u_d = D_t - d0 - beta_p P_t - beta_d1 D_{t-1}
        let params = paper_defaults(ModelKind::Model1);
        let (spec, _) = build_model(ModelKind::Model1, params.clone()).unwrap();
        let out = simulate(&spec, &SimulationConfig::new(3_000, 11)).unwrap();
        let p = out.data.column("P").unwrap();
        let d = out.data.column("D").unwrap();
        for t in 1..d.len() {
            let u = d[t] - params.d0 - params.beta_p * p[t] - params.beta_d1 * d[t - 1];
            assert!((u - out.noise.u_d[t]).abs() < 1e-9 * (1.0 + u.abs()));
        }

        // Model 2: u_d = D_t - d0 - beta_p P_t - beta_b1 B_{t-1}
        let params = paper_defaults(ModelKind::Model2);
        let (spec, _) = build_model(ModelKind::Model2, params.clone()).unwrap();
        let mut cfg = SimulationConfig::new(3_000, 11);
        cfg.keep_latent = true;
        let out = simulate(&spec, &cfg).unwrap();
        let p = out.data.column("P").unwrap();
        let d = out.data.column("D").unwrap();
        let b = out.data.column("B").unwrap();
        for t in 1..d.len() {
            let u = d[t] - params.d0 - params.beta_p * p[t] - params.beta_b1 * b[t - 1];
            assert!((u - out.noise.u_d[t]).abs() < 1e-9 * (1.0 + u.abs()));
        }

        // Model 3: u_d = D_t - d0 - beta_p P_t - beta_p1 P_{t-1}
        let params = paper_defaults(ModelKind::Model3);
        let (spec, _) = build_model(ModelKind::Model3, params.clone()).unwrap();
        let out = simulate(&spec, &SimulationConfig::new(3_000, 11)).unwrap();
        let p = out.data.column("P").unwrap();
        let d = out.data.column("D").unwrap();
        for t in 1..d.len() {
            let u = d[t] - params.d0 - params.beta_p * p[t] - params.beta_p1 * p[t - 1];
            assert!((u - out.noise.u_d[t]).abs() < 1e-9 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn default_model1_mean_demand_near_sixty_gwh() {
        let (spec, _) = build_model(ModelKind::Model1, paper_defaults(ModelKind::Model1)).unwrap();
        let out = simulate(&spec, &SimulationConfig::new(43_800, 3)).unwrap();
        let d = out.data.column("D").unwrap();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - 60_000.0).abs() / 60_000.0 < 0.005, "mean demand {mean}");
    }

    #[test]
    fn stationarity_halves_agree() {
        for kind in [ModelKind::Model1, ModelKind::Model2, ModelKind::Model3] {
            let (spec, _) = build_model(kind, paper_defaults(kind)).unwrap();
            let out = simulate(&spec, &SimulationConfig::new(40_000, 5)).unwrap();
            let d = out.data.column("D").unwrap();
            let half = d.len() / 2;
            let m1 = d[..half].iter().sum::<f64>() / half as f64;
            let m2 = d[half..].iter().sum::<f64>() / (d.len() - half) as f64;
            assert!(
                (m1 - m2).abs() / m1.abs() < 0.01,
                "halves differ for {kind:?}: {m1} vs {m2}"
            );
        }
    }

    #[test]
    fn rejects_zero_length_and_bad_shift() {
        let (spec, _) = build_model(ModelKind::Model1, paper_defaults(ModelKind::Model1)).unwrap();
        assert!(matches!(
            simulate(&spec, &SimulationConfig::new(0, 1)),
            Err(ScmError::EmptySample)
        ));
        let mut cfg = SimulationConfig::new(10, 1);
        cfg.demand_shift = Some(vec![0.0; 5]);
        assert!(matches!(
            simulate(&spec, &cfg),
            Err(ScmError::ShiftLengthMismatch { .. })
        ));
    }
}
