//! The built-in catalogue of rolled market graphs: the three equilibrium
//! demand models plus the three special cases under which the naive IV
//! estimator is valid.

use super::{Component, RolledTimeGraph};
use std::fmt;
use std::str::FromStr;

/// Identifier of a built-in rolled time graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinModel {
    /// Inertial demand: demand depends on its own previous value.
    Model1,
    /// Heterogeneous demand: a price-sensitive part plus an inertial
    /// price-insensitive part (kept in the graph as a latent process).
    Model2,
    /// Demand shifting: demand depends on the current and previous price.
    Model3,
    /// Model 1 with an i.i.d. instrument (no wind autocorrelation).
    IidInstrument,
    /// Model 1 without structural demand autocorrelation.
    NoDemandAutocorrelation,
    /// Model 1 with demand unresponsive to prices (no P -> D edge).
    UnresponsiveDemand,
}

impl BuiltinModel {
    pub const ALL: [BuiltinModel; 6] = [
        BuiltinModel::Model1,
        BuiltinModel::Model2,
        BuiltinModel::Model3,
        BuiltinModel::IidInstrument,
        BuiltinModel::NoDemandAutocorrelation,
        BuiltinModel::UnresponsiveDemand,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinModel::Model1 => "model1",
            BuiltinModel::Model2 => "model2",
            BuiltinModel::Model3 => "model3",
            BuiltinModel::IidInstrument => "iid-instrument",
            BuiltinModel::NoDemandAutocorrelation => "no-demand-autocorrelation",
            BuiltinModel::UnresponsiveDemand => "unresponsive-demand",
        }
    }
}

impl fmt::Display for BuiltinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "model1" | "model-1" | "1" | "i" => Ok(BuiltinModel::Model1),
            "model2" | "model-2" | "2" | "ii" => Ok(BuiltinModel::Model2),
            "model3" | "model-3" | "3" | "iii" => Ok(BuiltinModel::Model3),
            "iid-instrument" | "iid_instrument" => Ok(BuiltinModel::IidInstrument),
            "no-demand-autocorrelation" | "no_demand_autocorrelation" => {
                Ok(BuiltinModel::NoDemandAutocorrelation)
            }
            "unresponsive-demand" | "unresponsive_demand" | "beta-zero" => {
                Ok(BuiltinModel::UnresponsiveDemand)
            }
            other => Err(format!(
                "unknown model `{other}`; expected one of model1, model2, model3, \
                 iid-instrument, no-demand-autocorrelation, unresponsive-demand"
            )),
        }
    }
}

fn wpd() -> Vec<Component> {
    vec![
        Component::observed("W"),
        Component::observed("P"),
        Component::observed("D"),
    ]
}

/// Build one of the built-in rolled graphs.
pub fn builtin_graph(model: BuiltinModel) -> RolledTimeGraph {
    let mut g = match model {
        BuiltinModel::Model2 => {
            let mut comps = wpd();
            comps.push(Component::latent("B"));
            RolledTimeGraph::new(comps).unwrap()
        }
        _ => RolledTimeGraph::new(wpd()).unwrap(),
    };
    let add = |g: &mut RolledTimeGraph, s: &str, lag: u32, t: &str| {
        g.add_directed(s, lag, t).unwrap();
    };
    match model {
        BuiltinModel::Model1 => {
            add(&mut g, "W", 1, "W");
            add(&mut g, "W", 0, "P");
            add(&mut g, "D", 1, "P");
            add(&mut g, "P", 0, "D");
            add(&mut g, "D", 1, "D");
            g.add_bidirected("P", 0, "D").unwrap();
        }
        BuiltinModel::Model2 => {
            add(&mut g, "W", 1, "W");
            add(&mut g, "W", 0, "P");
            add(&mut g, "B", 1, "P");
            add(&mut g, "B", 1, "B");
            add(&mut g, "P", 0, "D");
            add(&mut g, "B", 1, "D");
            g.add_bidirected("P", 0, "D").unwrap();
        }
        BuiltinModel::Model3 => {
            add(&mut g, "W", 1, "W");
            add(&mut g, "W", 0, "P");
            add(&mut g, "P", 1, "P");
            add(&mut g, "P", 0, "D");
            add(&mut g, "P", 1, "D");
            g.add_bidirected("P", 0, "D").unwrap();
        }
        BuiltinModel::IidInstrument => {
            add(&mut g, "W", 0, "P");
            add(&mut g, "D", 1, "P");
            add(&mut g, "P", 0, "D");
            add(&mut g, "D", 1, "D");
            g.add_bidirected("P", 0, "D").unwrap();
        }
        BuiltinModel::NoDemandAutocorrelation => {
            add(&mut g, "W", 1, "W");
            add(&mut g, "W", 0, "P");
            add(&mut g, "P", 0, "D");
            g.add_bidirected("P", 0, "D").unwrap();
        }
        BuiltinModel::UnresponsiveDemand => {
            add(&mut g, "W", 1, "W");
            add(&mut g, "W", 0, "P");
            add(&mut g, "D", 1, "P");
            add(&mut g, "D", 1, "D");
            g.add_bidirected("P", 0, "D").unwrap();
        }
    }
    g
}

/// All built-in graphs, keyed by model.
pub fn builtin_graphs() -> Vec<(BuiltinModel, RolledTimeGraph)> {
    BuiltinModel::ALL
        .iter()
        .map(|&m| (m, builtin_graph(m)))
        .collect()
}
