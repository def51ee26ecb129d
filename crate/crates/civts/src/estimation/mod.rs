//! Conditional IV estimation: the estimator catalogue, design-matrix
//! construction, the closed-form residualize-then-project estimator with
//! HAC inference, the empirical rank check, and confidence-interval overlap
//! analysis for model rejection.

mod catalogue;
mod civ;
mod design;
mod hac;
mod loglog;
pub mod oracle;
mod overlap;

pub use catalogue::{catalogue, full_catalogue, EstimatorSpec, LaggedRef, CATALOGUE_LABELS};
pub use civ::{civ3_check, civ_estimate, civ_estimate_with, Civ3Report, CivOptions, EstimateResult, FirstStage};
pub use design::{build_design, Design};
pub use hac::{hac_covariance, newey_west_bandwidth};
pub use loglog::loglog_transform;
pub use overlap::{overlap_analysis, ModelRejection, OverlapReport, ValidityMatrix};

use thiserror::Error;

/// Errors raised by estimation-layer operations.
#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("estimator `{0}` has an empty instrument or regressor set")]
    EmptySpec(String),
    #[error(
        "estimator `{label}` violates the order condition: {instruments} instrument(s) \
         for {regressors} regressor(s)"
    )]
    OrderCondition { label: String, instruments: usize, regressors: usize },
    #[error("estimator `{label}` reuses {reference} across {sets}")]
    OverlappingSpecSets { label: String, sets: String, reference: String },
    #[error("unknown estimator label `{0}`; the catalogue has #1..#8")]
    UnknownEstimator(String),
    #[error("estimator `{0}` requires a lag depth L >= 1")]
    LagDepthRequired(String),
    #[error("dataset has no column `{0}`")]
    MissingColumn(String),
    #[error("dataset too short: {rows} rows cannot support lag {lag}")]
    InsufficientLength { rows: usize, lag: u32 },
    #[error("no usable rows remain after lag alignment and filtering")]
    NoUsableRows,
    #[error(
        "residualized instruments are rank deficient (rank {rank} of {cols}): \
         instruments are collinear given the conditioning set"
    )]
    InstrumentCollinear { rank: usize, cols: usize },
    #[error(
        "conditional cross-covariance of regressors and instruments is rank deficient \
         (smallest singular value {sigma_min:.3e}): the rank condition fails"
    )]
    RankConditionFailed { sigma_min: f64 },
    #[error("overlap analysis needs at least two estimates, got {0}")]
    TooFewEstimates(usize),
    #[error("log transform dropped every row (no positive prices)")]
    AllRowsDropped,
}
