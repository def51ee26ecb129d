//! Synthetic application fixture: an inertial-demand market trajectory with
//! calendar and weather structure planted on top, so the full covariate
//! pipeline is testable without proprietary data and with a known demand
//! slope.

use super::DatasetError;
use crate::scm::{build_model, paper_defaults, simulate, ModelKind, SimulationConfig, TimeSeriesDataset};
use chrono::{Datelike, NaiveDate, NaiveDateTime, TimeDelta, Timelike};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::Write;
use std::path::Path;

/// Ground truth planted in the fixture.
#[derive(Debug, Clone, Copy)]
pub struct FixtureTruth {
    pub beta_p: f64,
    pub beta_d1: f64,
}

fn stamps_from(start: NaiveDateTime, n: usize) -> Vec<NaiveDateTime> {
    (0..n).map(|h| start + TimeDelta::hours(h as i64)).collect()
}

/// Nation-wide holidays get fraction 1 (their rows are dropped by the
/// covariate filter); two dates carry fractional values.
fn holiday_fraction(stamp: &NaiveDateTime) -> f64 {
    match (stamp.month(), stamp.day()) {
        (1, 1) | (5, 1) | (10, 3) | (12, 25) => 1.0,
        (1, 6) => 0.3,
        (11, 1) => 0.55,
        _ => 0.0,
    }
}

/// Generate the fixture: an inertial-demand market with weather-driven and
/// calendar-driven demand shifts flowing through the clearing condition.
pub fn generate_application_fixture(
    seed: u64,
    t_len: usize,
) -> Result<(TimeSeriesDataset, FixtureTruth), DatasetError> {
    let start = NaiveDate::from_ymd_opt(2019, 1, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let stamps = stamps_from(start, t_len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(7));

    let mut heating = Vec::with_capacity(t_len);
    let mut sunlight = Vec::with_capacity(t_len);
    let mut holiday = Vec::with_capacity(t_len);
    for s in &stamps {
        let day_of_year = s.ordinal() as f64;
        let annual = (2.0 * std::f64::consts::PI * (day_of_year - 15.0) / 365.0).cos();
        let noise: f64 = rng.sample::<f64, _>(StandardNormal);
        // Heating degrees: cold in January, warm mid-year.
        heating.push((9.0 + 8.0 * annual + 1.5 * noise).max(0.0));
        let daylight_halfwidth = 6.0 + 2.0 * -annual;
        let hour = s.hour() as f64;
        sunlight.push(if (hour - 12.5).abs() < daylight_halfwidth { 1.0 } else { 0.0 });
        holiday.push(holiday_fraction(s));
    }

    // Demand shifts: weather response, a daily profile, and a holiday dip,
    // centered so the mean level stays at the model's target.
    let hour_profile = |h: f64| (2.0 * std::f64::consts::PI * (h - 18.0) / 24.0).cos();
    let mut shift: Vec<f64> = (0..t_len)
        .map(|t| {
            150.0 * heating[t] + 2_000.0 * hour_profile(stamps[t].hour() as f64)
                - 4_000.0 * holiday[t]
        })
        .collect();
    let mean_shift = shift.iter().sum::<f64>() / t_len as f64;
    for s in shift.iter_mut() {
        *s -= mean_shift;
    }

    let params = paper_defaults(ModelKind::Model1);
    let truth = FixtureTruth { beta_p: params.beta_p, beta_d1: params.beta_d1 };
    let (sim_spec, _) = build_model(ModelKind::Model1, params)?;
    let mut cfg = SimulationConfig::new(t_len, seed);
    cfg.demand_shift = Some(shift);
    let sim = simulate(&sim_spec, &cfg)?;

    let ds = TimeSeriesDataset::new(vec![
        ("W".into(), sim.data.column("W")?.to_vec()),
        ("P".into(), sim.data.column("P")?.to_vec()),
        ("D".into(), sim.data.column("D")?.to_vec()),
        ("heating_degrees".into(), heating),
        ("sunlight".into(), sunlight),
        ("holiday_fraction".into(), holiday),
    ])?
    .with_timestamps(stamps)?;
    Ok((ds, truth))
}

/// Write the fixture in the market CSV schema.
pub fn write_fixture_csv(ds: &TimeSeriesDataset, path: &Path) -> Result<(), DatasetError> {
    let stamps = ds.timestamps().ok_or(DatasetError::NoTimestamps)?;
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "timestamp,load,price,wind,heating_degrees,sunlight,holiday_fraction"
    )?;
    let d = ds.column("D")?;
    let p = ds.column("P")?;
    let w = ds.column("W")?;
    let heating = ds.column("heating_degrees")?;
    let sun = ds.column("sunlight")?;
    let hol = ds.column("holiday_fraction")?;
    for t in 0..ds.len() {
        writeln!(
            f,
            "{},{:.3},{:.3},{:.3},{:.3},{:.0},{:.3}",
            stamps[t].format("%Y-%m-%d %H:%M:%S"),
            d[t],
            p[t],
            w[t],
            heating[t],
            sun[t],
            hol[t]
        )?;
    }
    Ok(())
}
