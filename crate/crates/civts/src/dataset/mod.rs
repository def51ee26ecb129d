//! Ingestion of real-world hourly market data and the application pipeline:
//! schema-validated CSV loading, calendar/weather covariates, lag
//! construction before row filters, and the estimator battery with
//! covariate conditioning.

mod application;
mod covariates;
mod fixture;
mod lags;
mod load;
mod schema;

pub use application::{run_application, ApplicationConfig, ApplicationReport, SpecKind};
pub use covariates::{build_covariates, CovariateOptions, CovariateSet};
pub use fixture::{generate_application_fixture, write_fixture_csv, FixtureTruth};
pub use lags::{lags_then_split, SplitRule};
pub use load::{load_csv, DuplicatePolicy, LoadOptions, LoadReport};
pub use schema::MarketSchema;

use crate::estimation::EstimationError;
use crate::scm::ScmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing required column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("file has no data rows")]
    EmptyFile,
    #[error("duplicated timestamp {0}")]
    DuplicateTimestamp(String),
    #[error("timestamps must increase: {0} follows a later stamp")]
    NonMonotonicTimestamp(String),
    #[error("sub-hourly spacing at {0}; the schema is hourly")]
    SubHourlySpacing(String),
    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    Unparseable { row: usize, column: String, value: String },
    #[error("dataset has no timestamps; covariates need them")]
    NoTimestamps,
    #[error("unknown covariate column `{0}`")]
    UnknownCovariate(String),
    #[error("estimator list is empty")]
    NoEstimators,
    #[error(transparent)]
    Scm(#[from] ScmError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
