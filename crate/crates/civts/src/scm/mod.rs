//! Linear time-series SCMs for the equilibrium market models: parameter
//! bundles with paper-scale defaults, stationarity validation, trajectory
//! simulation with known ground truth, and sample statistics.

mod dataset;
mod params;
mod simulate;
mod stats;

pub use dataset::TimeSeriesDataset;
pub use params::{
    apply_intercepts, ar_spectral_radius, innovation_sd_for, paper_defaults, set_param,
    solve_intercept, stationary_means, validate_params, ModelParams, StationaryMeans,
    DEFAULT_MEAN_DEMAND, DEFAULT_WIND_MEAN, DEFAULT_WIND_SD,
};
pub use simulate::{
    build_model, simulate, NoiseTrace, SimulationConfig, SimulationResult, SimulatorSpec,
};
pub use stats::{fit_ar, observed_autocorrelation, summary_stats, ArFit, SummaryStats};

use crate::graph::BuiltinModel;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors raised by model construction and simulation.
#[derive(Debug, Error)]
pub enum ScmError {
    #[error("market clearing requires beta_p != gamma_p")]
    DegenerateClearing,
    #[error("nonstationary parameters: {0}")]
    Nonstationary(String),
    #[error("negative noise scale `{0}`")]
    NegativeSigma(String),
    #[error("sample length must be at least 1")]
    EmptySample,
    #[error("series too short for lag {lag}: length {len}")]
    SeriesTooShort { lag: usize, len: usize },
    #[error("autocorrelation undefined for a constant series")]
    ConstantSeries,
    #[error("AR order {order} too large for series of length {len}")]
    OrderTooLarge { order: usize, len: usize },
    #[error("AR design matrix is singular (constant or degenerate series)")]
    SingularDesign,
    #[error("demand shift series has length {got}, expected {expected}")]
    ShiftLengthMismatch { got: usize, expected: usize },
    #[error("dataset columns have unequal lengths")]
    RaggedColumns,
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("no column `{0}` in dataset")]
    MissingColumn(String),
    #[error("non-finite value in column `{column}` at row {row}")]
    NonFinite { column: String, row: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("invalid value for parameter `{key}`: `{value}`")]
    InvalidParameterValue { key: String, value: String },
}

/// Which structural model generates the data. The three special cases share
/// Model 1's structure with one coefficient pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Inertial demand: D_t depends on D_{t-1}.
    Model1,
    /// Heterogeneous demand: price-sensitive part plus an inertial
    /// price-insensitive part B.
    Model2,
    /// Demand shifting: D_t depends on P_t and P_{t-1}.
    Model3,
    /// Model 1 with an i.i.d. wind process.
    IidInstrument,
    /// Model 1 with beta_d1 = 0.
    NoDemandAutocorrelation,
    /// Model 1 with beta_p = 0.
    UnresponsiveDemand,
}

impl ModelKind {
    /// The Model 1 family shares the inertial-demand recursion.
    pub fn is_model1_family(&self) -> bool {
        !matches!(self, ModelKind::Model2 | ModelKind::Model3)
    }

    pub fn builtin(&self) -> BuiltinModel {
        match self {
            ModelKind::Model1 => BuiltinModel::Model1,
            ModelKind::Model2 => BuiltinModel::Model2,
            ModelKind::Model3 => BuiltinModel::Model3,
            ModelKind::IidInstrument => BuiltinModel::IidInstrument,
            ModelKind::NoDemandAutocorrelation => BuiltinModel::NoDemandAutocorrelation,
            ModelKind::UnresponsiveDemand => BuiltinModel::UnresponsiveDemand,
        }
    }

    pub fn name(&self) -> &'static str {
        self.builtin().name()
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b: BuiltinModel = s.parse()?;
        Ok(match b {
            BuiltinModel::Model1 => ModelKind::Model1,
            BuiltinModel::Model2 => ModelKind::Model2,
            BuiltinModel::Model3 => ModelKind::Model3,
            BuiltinModel::IidInstrument => ModelKind::IidInstrument,
            BuiltinModel::NoDemandAutocorrelation => ModelKind::NoDemandAutocorrelation,
            BuiltinModel::UnresponsiveDemand => ModelKind::UnresponsiveDemand,
        })
    }
}
