//! Graphical validity and estimation of price elasticities on causal time
//! graphs.
//!
//! The crate has five layers:
//! - [`graph`]: rolled and unrolled causal time graphs with bidirected
//!   edges, latent projection, d-separation, and graphical validity
//!   verdicts for conditional IV estimators.
//! - [`scm`]: linear equilibrium market models (inertial, heterogeneous,
//!   and price-shifting demand) simulated with known ground truth.
//! - [`estimation`]: the conditional/nuisance IV estimator catalogue in
//!   closed form with HAC inference and CI-overlap model rejection.
//! - [`experiments`]: desk- and paper-scale simulation studies producing
//!   figure-ready tables, CSVs, and SVGs.
//! - [`dataset`]: ingestion of hourly market CSVs, calendar and weather
//!   covariates, and the application pipeline.
//!
//! The `examples/` directory holds one runnable example per capability; the
//! `civts` binary exposes the same operations as subcommands.

pub(crate) mod linalg;

pub mod cli;
pub mod dataset;
pub mod estimation;
pub mod experiments;
pub mod graph;
pub mod scm;

pub use estimation::{catalogue, civ_estimate,EstimateResult, EstimatorSpec, LaggedRef};
pub use graph::{builtin_graph, builtin_graphs, check_civ_graphical, BuiltinModel, CivVerdict};
pub use scm::{
    build_model, paper_defaults, simulate, ModelKind, ModelParams, SimulationConfig,
    TimeSeriesDataset,
};
