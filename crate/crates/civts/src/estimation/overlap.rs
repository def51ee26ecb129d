//! Confidence-interval overlap analysis for model rejection.
//!
//! If a structural model is right, every estimator that is graphically valid
//! under it should agree up to sampling error; a non-overlapping pair of 95%
//! intervals among a model's ex-ante-valid estimators rejects that model.

use super::{EstimateResult, EstimationError};
use serde::Serialize;

/// Ex-ante validity of estimator labels under candidate models.
#[derive(Debug, Clone, Serialize)]
pub struct ValidityMatrix {
    pub models: Vec<String>,
    /// One row per estimator label: (label, valid-under-model flags aligned
    /// with `models`).
    pub rows: Vec<(String, Vec<bool>)>,
}

impl ValidityMatrix {
    pub fn is_valid(&self, label: &str, model: &str) -> Option<bool> {
        let m = self.models.iter().position(|x| x == model)?;
        self.rows
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, flags)| flags[m])
    }

    /// Graphical validity of the catalogue rows under the three demand
    /// models, computed from the built-in graphs at the given lag depth.
    pub fn from_builtin_graphs(lag_depth: u32) -> Result<ValidityMatrix, crate::graph::GraphError> {
        use crate::graph::{builtin_graph, check_civ_graphical, BuiltinModel, WindowPolicy};
        let models = [BuiltinModel::Model1, BuiltinModel::Model2, BuiltinModel::Model3];
        let mut rows = Vec::new();
        for label in super::CATALOGUE_LABELS {
            let spec = super::catalogue(label, lag_depth)
                .expect("catalogue labels are valid at lag depth >= 2");
            let mut flags = Vec::new();
            for model in models {
                let g = builtin_graph(model);
                let verdict = check_civ_graphical(&g, &spec, WindowPolicy::Auto)?;
                flags.push(verdict.valid());
            }
            rows.push((label.to_string(), flags));
        }
        Ok(ValidityMatrix {
            models: models.iter().map(|m| m.name().to_string()).collect(),
            rows,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateSummary {
    pub label: String,
    pub beta: f64,
    pub ci: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelRejection {
    pub model: String,
    pub rejected: bool,
    /// Pairs of ex-ante-valid estimators whose intervals do not overlap.
    pub conflicts: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapReport {
    pub estimates: Vec<EstimateSummary>,
    /// Symmetric overlap flags on the effect-of-interest intervals.
    pub pairwise_overlap: Vec<Vec<bool>>,
    pub rejections: Vec<ModelRejection>,
}

fn intervals_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Pairwise CI overlap of the effect-of-interest coefficients plus the
/// per-model rejection flags.
pub fn overlap_analysis(
    results: &[EstimateResult],
    validity: &ValidityMatrix,
) -> Result<OverlapReport, EstimationError> {
    if results.len() < 2 {
        return Err(EstimationError::TooFewEstimates(results.len()));
    }
    let estimates: Vec<EstimateSummary> = results
        .iter()
        .map(|r| EstimateSummary { label: r.label.clone(), beta: r.beta_hat[0], ci: r.ci[0] })
        .collect();
    let n = estimates.len();
    let mut overlap = vec![vec![true; n]; n];
    for i in 0..n {
        for j in 0..n {
            overlap[i][j] = intervals_overlap(estimates[i].ci, estimates[j].ci);
        }
    }
    let mut rejections = Vec::new();
    for (m, model) in validity.models.iter().enumerate() {
        let mut conflicts = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let vi = validity
                    .rows
                    .iter()
                    .find(|(l, _)| *l == estimates[i].label)
                    .map(|(_, f)| f[m])
                    .unwrap_or(false);
                let vj = validity
                    .rows
                    .iter()
                    .find(|(l, _)| *l == estimates[j].label)
                    .map(|(_, f)| f[m])
                    .unwrap_or(false);
                if vi && vj && !overlap[i][j] {
                    conflicts.push((estimates[i].label.clone(), estimates[j].label.clone()));
                }
            }
        }
        rejections.push(ModelRejection { model: model.clone(), rejected: !conflicts.is_empty(), conflicts });
    }
    Ok(OverlapReport { estimates, pairwise_overlap: overlap, rejections })
}
