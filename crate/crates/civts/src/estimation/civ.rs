//! The conditional IV estimator in closed form with HAC inference.
//!
//! Outcome, regressors, and instruments are residualized on the conditioning
//! block (plus an intercept and any covariates) by least squares; the
//! coefficient is the two-stage projection
//! `beta = (rX' P rX)^{-1} rX' P rY` with `P` the projection onto the
//! residualized instruments. Over-identified sets use the same unweighted
//! projection.

use super::design::{build_design_with, Design};
use super::hac::{hac_covariance, newey_west_bandwidth};
use super::{EstimationError, EstimatorSpec};
use crate::linalg;
use crate::scm::TimeSeriesDataset;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Tuning knobs for `civ_estimate`.
#[derive(Debug, Clone, Default)]
pub struct CivOptions {
    /// Bartlett bandwidth; `None` uses the Newey-West rule.
    pub hac_bandwidth: Option<usize>,
    /// Extra lag-0 conditioning columns aligned to the dataset rows.
    pub covariates: Vec<(String, Vec<f64>)>,
}

/// First-stage diagnostics: coefficients of the residualized instruments on
/// the residualized regressors, and the standard deviation of the first
/// residualized instrument.
#[derive(Debug, Clone, Serialize)]
pub struct FirstStage {
    /// `coefficients[i][j]`: loading of instrument i on regressor j.
    pub coefficients: Vec<Vec<f64>>,
    pub resid_instrument_sd: f64,
}

/// A fitted conditional IV estimate.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateResult {
    pub label: String,
    pub regressor_names: Vec<String>,
    pub beta_hat: Vec<f64>,
    pub hac_cov: Vec<Vec<f64>>,
    pub se: Vec<f64>,
    /// 95% intervals, `beta_hat[i] +/- 1.96 * se[i]`.
    pub ci: Vec<(f64, f64)>,
    pub first_stage: FirstStage,
    /// Smallest singular value of the conditional cross-covariance
    /// `rX' rI / n`.
    pub civ3_sigma_min: f64,
    pub n_used: usize,
    pub hac_bandwidth: usize,
    /// Conditioning columns found collinear and effectively dropped.
    pub dropped_collinear: usize,
}

impl EstimateResult {
    /// Point estimate and CI of the effect of interest (first regressor).
    pub fn effect(&self) -> (f64, (f64, f64)) {
        (self.beta_hat[0], self.ci[0])
    }
}

/// Estimate with default options.
pub fn civ_estimate(
    ds: &TimeSeriesDataset,
    spec: &EstimatorSpec,
) -> Result<EstimateResult, EstimationError> {
    civ_estimate_with(ds, spec, &CivOptions::default())
}

/// Estimate with explicit options.
pub fn civ_estimate_with(
    ds: &TimeSeriesDataset,
    spec: &EstimatorSpec,
    opts: &CivOptions,
) -> Result<EstimateResult, EstimationError> {
    let design = build_design_with(ds, spec, &opts.covariates)?;
    estimate_from_design(&design, &spec.label, opts)
}

pub(super) struct Residualized {
    pub r_y: DVector<f64>,
    pub r_x: DMatrix<f64>,
    pub r_i: DMatrix<f64>,
    pub dropped_collinear: usize,
}

/// Residualize Y, X, and I on [intercept | conditioning]. An intercept is
/// always included: the estimator's moment conditions are stated for
/// zero-mean processes and real data are not centered.
pub(super) fn residualize_design(design: &Design) -> Residualized {
    let n = design.n_used;
    let kb = design.conditioning.ncols();
    let mut c = DMatrix::<f64>::zeros(n, kb + 1);
    c.column_mut(0).fill(1.0);
    c.columns_mut(1, kb).copy_from(&design.conditioning);

    let mut stacked = DMatrix::<f64>::zeros(n, 1 + design.x.ncols() + design.instruments.ncols());
    stacked.column_mut(0).copy_from(&design.y);
    stacked
        .columns_mut(1, design.x.ncols())
        .copy_from(&design.x);
    stacked
        .columns_mut(1 + design.x.ncols(), design.instruments.ncols())
        .copy_from(&design.instruments);
    let (resid, rank_c) = linalg::residualize(&c, &stacked);

    Residualized {
        r_y: DVector::from_column_slice(resid.column(0).as_slice()),
        r_x: resid.columns(1, design.x.ncols()).into_owned(),
        r_i: resid
            .columns(1 + design.x.ncols(), design.instruments.ncols())
            .into_owned(),
        dropped_collinear: (kb + 1).saturating_sub(rank_c),
    }
}

fn estimate_from_design(
    design: &Design,
    label: &str,
    opts: &CivOptions,
) -> Result<EstimateResult, EstimationError> {
    let n = design.n_used;
    let kx = design.x.ncols();
    let ki = design.instruments.ncols();
    let r = residualize_design(design);
    let r_y_m = DMatrix::from_column_slice(n, 1, r.r_y.as_slice());

    // Empirical conditional cross-covariance and its smallest singular value.
    let cross = r.r_x.transpose() * &r.r_i / n as f64;
    let (sigma_min, _) = linalg::singular_extrema(&cross);

    // First stage; the residualized instruments must span at least kx
    // dimensions.
    let (pi_hat, rank_i) = linalg::lstsq(&r.r_i, &r.r_x);
    if rank_i < kx {
        return Err(EstimationError::InstrumentCollinear { rank: rank_i, cols: ki });
    }
    let x_hat = &r.r_i * &pi_hat;
    let (beta, rank_xhat) = linalg::lstsq(&x_hat, &r_y_m);
    if rank_xhat < kx {
        return Err(EstimationError::RankConditionFailed { sigma_min });
    }
    let beta = DVector::from_column_slice(beta.as_slice());

    // HAC sandwich on the projected scores x_hat_t * u_t.
    let u = &r.r_y - &r.r_x * &beta;
    let bandwidth = opts.hac_bandwidth.unwrap_or_else(|| newey_west_bandwidth(n));
    let s = hac_covariance(&x_hat, &u, bandwidth);
    let a = x_hat.transpose() * &r.r_x / n as f64;
    // cov = A^{-1} S A^{-T} / n
    let (ainv_s, _) = linalg::lstsq(&a, &s);
    let (cov_t, _) = linalg::lstsq(&a, &ainv_s.transpose());
    let cov = cov_t.transpose() / n as f64;

    let se: Vec<f64> = (0..kx).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let ci: Vec<(f64, f64)> = (0..kx)
        .map(|j| (beta[j] - 1.96 * se[j], beta[j] + 1.96 * se[j]))
        .collect();

    let first_col = r.r_i.column(0);
    let resid_sd = (first_col.norm_squared() / n as f64).sqrt();

    Ok(EstimateResult {
        label: label.to_string(),
        regressor_names: design.x_names.clone(),
        beta_hat: beta.as_slice().to_vec(),
        hac_cov: (0..kx)
            .map(|i| (0..kx).map(|j| cov[(i, j)]).collect())
            .collect(),
        se,
        ci,
        first_stage: FirstStage {
            coefficients: (0..ki)
                .map(|i| (0..kx).map(|j| pi_hat[(i, j)]).collect())
                .collect(),
            resid_instrument_sd: resid_sd,
        },
        civ3_sigma_min: sigma_min,
        n_used: n,
        hac_bandwidth: bandwidth,
        dropped_collinear: r.dropped_collinear,
    })
}

/// Empirical rank-condition check: the smallest singular value of the
/// conditional cross-covariance of regressors and instruments, both on the
/// covariance scale and rescaled to a correlation-like scale that a
/// sample-noise threshold can be applied to.
#[derive(Debug, Clone, Serialize)]
pub struct Civ3Report {
    pub sigma_min: f64,
    /// Singular value of the column-standardized cross-covariance.
    pub sigma_min_scaled: f64,
    pub pass: bool,
    pub tol: f64,
    pub n_used: usize,
}

/// Check the rank condition for `spec` on `ds`. `tol` applies to the scaled
/// statistic; `None` uses `3 / sqrt(n)` (the scale of pure sampling noise).
pub fn civ3_check(
    ds: &TimeSeriesDataset,
    spec: &EstimatorSpec,
    tol: Option<f64>,
) -> Result<Civ3Report, EstimationError> {
    let design = build_design_with(ds, spec, &[])?;
    let n = design.n_used;
    let r = residualize_design(&design);
    let cross = r.r_x.transpose() * &r.r_i / n as f64;
    let (sigma_min, _) = linalg::singular_extrema(&cross);

    let sd = |m: &DMatrix<f64>, j: usize| (m.column(j).norm_squared() / n as f64).sqrt();
    let mut scaled = cross.clone();
    for xi in 0..scaled.nrows() {
        for ii in 0..scaled.ncols() {
            let denom = sd(&r.r_x, xi) * sd(&r.r_i, ii);
            scaled[(xi, ii)] = if denom > 0.0 { scaled[(xi, ii)] / denom } else { 0.0 };
        }
    }
    let (sigma_min_scaled, _) = linalg::singular_extrema(&scaled);
    let tol = tol.unwrap_or(3.0 / (n as f64).sqrt());
    Ok(Civ3Report { sigma_min, sigma_min_scaled, pass: sigma_min_scaled > tol, tol, n_used: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::catalogue;
    use crate::scm::{build_model, paper_defaults, simulate, ModelKind, SimulationConfig};

    fn sim(kind: ModelKind, t: usize, seed: u64) -> TimeSeriesDataset {
        let (spec, _) = build_model(kind, paper_defaults(kind)).unwrap();
        simulate(&spec, &SimulationConfig::new(t, seed)).unwrap().data
    }

    #[test]
    fn naive_iv_consistent_on_model2() {
        let ds = sim(ModelKind::Model2, 43_800, 21);
        let est = civ_estimate(&ds, &catalogue("#1", 0).unwrap()).unwrap();
        let (beta, (lo, hi)) = est.effect();
        assert!(lo <= -100.0 && -100.0 <= hi, "beta = {beta}, ci = [{lo}, {hi}]");
    }

    #[test]
    fn naive_iv_biased_on_model1() {
        let ds = sim(ModelKind::Model1, 43_800, 22);
        let est = civ_estimate(&ds, &catalogue("#1", 0).unwrap()).unwrap();
        let (beta, (lo, hi)) = est.effect();
        // Asymptotically around -270 for the default parameters.
        assert!(hi < -100.0, "beta = {beta}, ci = [{lo}, {hi}]");
        assert!(beta < -200.0, "beta = {beta}");
    }

    #[test]
    fn conditioning_on_instrument_lags_recovers_truth_on_model1() {
        let ds = sim(ModelKind::Model1, 43_800, 23);
        for label in ["#2", "#4", "#8"] {
            let est = civ_estimate(&ds, &catalogue(label, 5).unwrap()).unwrap();
            let (beta, (lo, hi)) = est.effect();
            assert!(
                lo <= -100.0 && -100.0 <= hi,
                "{label}: beta = {beta}, ci = [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn perfect_instrument_equals_ols() {
        // X used as its own instrument collapses the projection to OLS.
        // Built literally (the constructor would reject I == X, which is the
        // point of this degenerate check).
        let ds = sim(ModelKind::Model1, 5_000, 24);
        let iv_spec = crate::estimation::EstimatorSpec {
            label: "self".into(),
            instruments: vec![crate::estimation::LaggedRef::new("P", 1)],
            regressors: vec![crate::estimation::LaggedRef::new("P", 1)],
            conditioning: vec![],
            outcome: crate::estimation::LaggedRef::new("D", 0),
        };
        let est = civ_estimate(&ds, &iv_spec).unwrap();
        // Direct OLS of D on demeaned P_{t-1} with intercept.
        let p = ds.column("P").unwrap();
        let d = ds.column("D").unwrap();
        let n = d.len() - 1;
        let (px, dy): (Vec<f64>, Vec<f64>) =
            (1..d.len()).map(|t| (p[t - 1], d[t])).unzip();
        let pm = px.iter().sum::<f64>() / n as f64;
        let dm = dy.iter().sum::<f64>() / n as f64;
        let num: f64 = px.iter().zip(&dy).map(|(a, b)| (a - pm) * (b - dm)).sum();
        let den: f64 = px.iter().map(|a| (a - pm).powi(2)).sum();
        let ols = num / den;
        assert!(
            (est.beta_hat[0] - ols).abs() < 1e-8 * ols.abs(),
            "iv {} vs ols {ols}",
            est.beta_hat[0]
        );
    }

    #[test]
    fn duplicated_regressor_fails_rank_condition() {
        let ds = sim(ModelKind::Model1, 2_000, 25);
        // Two copies of P at the same lag cannot be separated.
        let spec = crate::estimation::EstimatorSpec {
            label: "dup".into(),
            instruments: vec![
                crate::estimation::LaggedRef::new("W", 0),
                crate::estimation::LaggedRef::new("W", 1),
            ],
            regressors: vec![
                crate::estimation::LaggedRef::new("P", 0),
                crate::estimation::LaggedRef::new("P", 0),
            ],
            conditioning: vec![],
            outcome: crate::estimation::LaggedRef::new("D", 0),
        };
        let err = civ_estimate(&ds, &spec);
        assert!(matches!(err, Err(EstimationError::RankConditionFailed { .. })));
    }

    #[test]
    fn collinear_instruments_detected() {
        let ds = sim(ModelKind::Model1, 2_000, 26);
        // The same instrument twice leaves a one-dimensional span for two
        // regressors.
        let spec = crate::estimation::EstimatorSpec {
            label: "coll".into(),
            instruments: vec![
                crate::estimation::LaggedRef::new("W", 0),
                crate::estimation::LaggedRef::new("W", 0),
            ],
            regressors: vec![
                crate::estimation::LaggedRef::new("P", 0),
                crate::estimation::LaggedRef::new("P", 1),
            ],
            conditioning: vec![],
            outcome: crate::estimation::LaggedRef::new("D", 0),
        };
        assert!(matches!(
            civ_estimate(&ds, &spec),
            Err(EstimationError::InstrumentCollinear { .. })
        ));
    }

    #[test]
    fn civ3_detects_irrelevant_instrument() {
        // gamma_w = 0 disconnects wind from the market entirely.
        let mut params = paper_defaults(ModelKind::Model1);
        params.gamma_w = 0.0;
        let (spec, _) = build_model(ModelKind::Model1, params).unwrap();
        let ds = simulate(&spec, &SimulationConfig::new(20_000, 27)).unwrap().data;
        let report = civ3_check(&ds, &catalogue("#2", 2).unwrap(), None).unwrap();
        assert!(!report.pass, "sigma_min_scaled = {}", report.sigma_min_scaled);

        let ds_ok = sim(ModelKind::Model1, 20_000, 27);
        let report_ok = civ3_check(&ds_ok, &catalogue("#2", 2).unwrap(), None).unwrap();
        assert!(report_ok.pass);
        assert!(report_ok.sigma_min_scaled > 0.5);
    }

    #[test]
    fn scale_equivariance_in_the_instrument() {
        let ds = sim(ModelKind::Model1, 5_000, 28);
        let spec = catalogue("#2", 2).unwrap();
        let base = civ_estimate(&ds, &spec).unwrap();
        let w_scaled: Vec<f64> = ds.column("W").unwrap().iter().map(|v| v * -3.7).collect();
        let ds2 = ds.with_column("W", w_scaled).unwrap();
        let scaled = civ_estimate(&ds2, &spec).unwrap();
        assert!(
            (base.beta_hat[0] - scaled.beta_hat[0]).abs() < 1e-9 * base.beta_hat[0].abs(),
            "{} vs {}",
            base.beta_hat[0],
            scaled.beta_hat[0]
        );
    }
}
