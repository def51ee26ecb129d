//! The simulation studies: validity/overlap panel, bias heatmap, observed
//! vs. structural autocorrelation, and coverage/error/CI-length indicators.
//! Each study returns a figure-ready table plus provenance metadata; the
//! assets layer renders deterministic CSV and a minimal SVG.

mod assets;
mod config;
mod heatmap;
mod indicators;
mod observed_ar;
mod svg;
mod table;
mod validity;

pub use assets::{emit_figure_assets, render_figure, FigureStyle};
pub use config::{ExperimentConfig, ExperimentName, Preset};
pub use heatmap::run_bias_heatmap;
pub use indicators::run_indicators;
pub use observed_ar::run_observed_ar;
pub use table::{Cell, Table};
pub use validity::run_validity_panel;

use crate::estimation::EstimationError;
use crate::graph::GraphError;
use crate::scm::ScmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment grid must be non-empty")]
    EmptyGrid,
    #[error("experiment needs at least one replicate")]
    ZeroReplicates,
    #[error("table is empty; nothing to render")]
    EmptyTable,
    #[error("experiment `{name}` does not accept estimator `{estimator}`")]
    UnsupportedEstimator { name: String, estimator: String },
    #[error("model `{0}` is not supported by this experiment")]
    UnsupportedModel(String),
    #[error(transparent)]
    Scm(#[from] ScmError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// The result of one experiment run: the data table, the figure style it
/// renders with, and a provenance sidecar (fully resolved configuration and
/// parameters) sufficient to re-derive the figure.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: Table,
    pub style: FigureStyle,
    pub meta: serde_json::Value,
}

/// Dispatch an experiment by name.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    match cfg.name {
        ExperimentName::ValidityPanel => run_validity_panel(cfg),
        ExperimentName::BiasHeatmap => run_bias_heatmap(cfg),
        ExperimentName::ObservedAr => run_observed_ar(cfg),
        ExperimentName::Indicators => run_indicators(cfg),
    }
}
