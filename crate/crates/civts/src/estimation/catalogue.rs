//! Estimator specifications and the built-in catalogue of eight conditional
//! and nuisance IV estimators for the market models.

use super::EstimationError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A reference to a component at a non-negative lag (lag 0 = contemporaneous,
/// lag k = k hours in the past).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LaggedRef {
    pub component: String,
    pub lag: u32,
}

impl LaggedRef {
    pub fn new(component: &str, lag: u32) -> Self {
        Self { component: component.to_string(), lag }
    }
}

impl fmt::Display for LaggedRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lag == 0 {
            write!(f, "{}@0", self.component)
        } else {
            write!(f, "{}@-{}", self.component, self.lag)
        }
    }
}

/// An IV estimation problem: instruments, regressors (the first one is the
/// effect of interest, the rest are nuisance), a conditioning set, and the
/// outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub label: String,
    pub instruments: Vec<LaggedRef>,
    pub regressors: Vec<LaggedRef>,
    pub conditioning: Vec<LaggedRef>,
    pub outcome: LaggedRef,
}

impl EstimatorSpec {
    pub fn new(
        label: &str,
        instruments: Vec<LaggedRef>,
        regressors: Vec<LaggedRef>,
        conditioning: Vec<LaggedRef>,
        outcome: LaggedRef,
    ) -> Result<Self, EstimationError> {
        let spec = Self {
            label: label.to_string(),
            instruments,
            regressors,
            conditioning,
            outcome,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), EstimationError> {
        if self.instruments.is_empty() || self.regressors.is_empty() {
            return Err(EstimationError::EmptySpec(self.label.clone()));
        }
        if self.instruments.len() < self.regressors.len() {
            return Err(EstimationError::OrderCondition {
                label: self.label.clone(),
                instruments: self.instruments.len(),
                regressors: self.regressors.len(),
            });
        }
        let mut xy = self.regressors.clone();
        xy.push(self.outcome.clone());
        for (name, set_a, set_b) in [
            ("instruments/regressors+outcome", &self.instruments, &xy),
            ("instruments/conditioning", &self.instruments, &self.conditioning),
            ("regressors+outcome/conditioning", &xy, &self.conditioning),
        ] {
            for a in set_a {
                if set_b.contains(a) {
                    return Err(EstimationError::OverlappingSpecSets {
                        label: self.label.clone(),
                        sets: name.to_string(),
                        reference: a.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest lag referenced anywhere in the spec.
    pub fn max_lag(&self) -> u32 {
        self.instruments
            .iter()
            .chain(self.regressors.iter())
            .chain(self.conditioning.iter())
            .chain(std::iter::once(&self.outcome))
            .map(|r| r.lag)
            .max()
            .unwrap_or(0)
    }

    /// The effect-of-interest regressor (first entry of the regressor list).
    pub fn effect_of_interest(&self) -> &LaggedRef {
        &self.regressors[0]
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |refs: &[LaggedRef]| {
            refs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
        };
        write!(
            f,
            "CIV({} | {} -> {} | {})",
            join(&self.instruments),
            join(&self.regressors),
            self.outcome,
            if self.conditioning.is_empty() {
                "{}".to_string()
            } else {
                join(&self.conditioning)
            }
        )
    }
}

/// Catalogue labels `#1` through `#8`.
pub const CATALOGUE_LABELS: [&str; 8] = ["#1", "#2", "#3", "#4", "#5", "#6", "#7", "#8"];

fn wind_lags(from: u32, to: u32) -> Vec<LaggedRef> {
    (from..=to).map(|s| LaggedRef::new("W", s)).collect()
}

/// Build a catalogue estimator. `lag_depth` is the L parameter for the rows
/// that are defined "up to L lags"; rows #1 and #3 ignore it.
pub fn catalogue(label: &str, lag_depth: u32) -> Result<EstimatorSpec, EstimationError> {
    let normalized = label.trim_start_matches('#');
    let l = lag_depth;
    let y = LaggedRef::new("D", 0);
    let p0 = LaggedRef::new("P", 0);
    match normalized {
        "1" => EstimatorSpec::new("#1", wind_lags(0, 0), vec![p0], vec![], y),
        "2" => {
            require_l(l, "#2")?;
            EstimatorSpec::new("#2", wind_lags(0, 0), vec![p0], wind_lags(1, l), y)
        }
        "3" => EstimatorSpec::new(
            "#3",
            wind_lags(0, 0),
            vec![p0],
            vec![LaggedRef::new("D", 1)],
            y,
        ),
        "4" => {
            require_l(l, "#4")?;
            let mut cond = Vec::new();
            for s in 1..=l {
                cond.push(LaggedRef::new("W", s));
                cond.push(LaggedRef::new("P", s));
                cond.push(LaggedRef::new("D", s));
            }
            EstimatorSpec::new("#4", wind_lags(0, 0), vec![p0], cond, y)
        }
        "5" => {
            require_l(l, "#5")?;
            EstimatorSpec::new(
                "#5",
                wind_lags(0, l),
                vec![p0, LaggedRef::new("D", 1)],
                vec![],
                y,
            )
        }
        "6" => {
            require_l(l, "#6")?;
            EstimatorSpec::new(
                "#6",
                wind_lags(0, l),
                vec![p0, LaggedRef::new("P", 1)],
                vec![],
                y,
            )
        }
        "7" => {
            require_l(l, "#7")?;
            EstimatorSpec::new(
                "#7",
                wind_lags(0, l),
                vec![p0, LaggedRef::new("P", 1)],
                vec![LaggedRef::new("D", 1)],
                y,
            )
        }
        "8" => {
            require_l(l, "#8")?;
            EstimatorSpec::new(
                "#8",
                wind_lags(0, l),
                vec![p0, LaggedRef::new("P", 1), LaggedRef::new("D", 1)],
                vec![],
                y,
            )
        }
        other => Err(EstimationError::UnknownEstimator(other.to_string())),
    }
}

fn require_l(l: u32, label: &str) -> Result<(), EstimationError> {
    if l == 0 {
        return Err(EstimationError::LagDepthRequired(label.to_string()));
    }
    Ok(())
}

/// The full catalogue at a common lag depth.
pub fn full_catalogue(lag_depth: u32) -> Result<Vec<EstimatorSpec>, EstimationError> {
    CATALOGUE_LABELS
        .iter()
        .map(|l| catalogue(l, lag_depth))
        .collect()
}
