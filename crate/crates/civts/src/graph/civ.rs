//! Graphical validity of conditional IV estimators.
//!
//! An estimator (I | X -> Y | B) is graphically valid when
//! - the instruments I and the outcome Y are d-separated by B after removing
//!   every direct edge from X into Y (criterion 1), and
//! - B contains neither the outcome nor any of its descendants (criterion 2).
//!
//! Both criteria concern the infinite stationary graph; they are decided on a
//! finite unrolled window and re-checked on a strictly larger window, which
//! must agree. Bounded-lag stationary edges make path existence stabilize
//! once the window is wide enough, and the double check guards the heuristic.

use super::dsep::{d_separated, witness_path, PathStep};
use super::unrolled::NodeSet;
use super::{GraphError, NodeId, RolledTimeGraph, UnrolledGraph};
use crate::estimation::{EstimatorSpec, LaggedRef};

/// How to choose the unrolled window for a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    /// `3 * (max query lag + graph max lag) + 3`, anchored so the query's
    /// time-0 node has equal past and future margin.
    Auto,
    /// Explicit base window length.
    Fixed(usize),
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy::Auto
    }
}

/// A node of a witness, positioned relative to the query anchor
/// (offset 0 = the outcome's time, negative = past).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelNode {
    pub component: String,
    pub offset: i64,
}

impl RelNode {
    pub fn render(&self) -> String {
        format!("{}@{}", self.component, self.offset)
    }
}

/// A witness path in anchor-relative coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelPath {
    pub nodes: Vec<RelNode>,
    pub steps: Vec<PathStep>,
}

impl RelPath {
    pub fn render(&self) -> String {
        let mut out = self.nodes[0].render();
        for (i, step) in self.steps.iter().enumerate() {
            let glyph = match step {
                PathStep::Forward => "->",
                PathStep::Backward => "<-",
                PathStep::Bidirected => "<->",
            };
            out.push_str(&format!(" {} {}", glyph, self.nodes[i + 1].render()));
        }
        out
    }
}

/// Result of the graphical check.
#[derive(Debug, Clone)]
pub struct CivVerdict {
    pub civ1: bool,
    pub civ2: bool,
    /// An unblocked instrument-to-outcome path, present exactly when civ1
    /// fails. Shortest first, ties broken lexicographically.
    pub witness_path: Option<RelPath>,
    /// A conditioning node that is the outcome or one of its descendants,
    /// present exactly when civ2 fails.
    pub witness_descendant: Option<RelNode>,
    /// Base window the verdict was decided on.
    pub window: usize,
}

impl CivVerdict {
    pub fn valid(&self) -> bool {
        self.civ1 && self.civ2
    }
}

struct AnchoredQuery {
    instruments: NodeSet,
    regressors: NodeSet,
    conditioning: NodeSet,
    outcome: NodeId,
    anchor: usize,
}

fn anchor_query(
    g: &RolledTimeGraph,
    spec: &EstimatorSpec,
    window: usize,
) -> Result<AnchoredQuery, GraphError> {
    let anchor = (window - 1) / 2;
    let to_node = |r: &LaggedRef| -> Result<NodeId, GraphError> {
        let ci = g.component_index(&r.component)?;
        if !g.components()[ci].observed {
            return Err(GraphError::LatentReference(r.component.clone()));
        }
        let lag = r.lag as usize;
        if lag > anchor {
            return Err(GraphError::WindowTooSmall { required: 2 * lag + 1, got: window });
        }
        Ok(NodeId::new(anchor - lag, ci))
    };
    let collect = |refs: &[LaggedRef]| -> Result<NodeSet, GraphError> {
        refs.iter().map(&to_node).collect()
    };
    Ok(AnchoredQuery {
        instruments: collect(&spec.instruments)?,
        regressors: collect(&spec.regressors)?,
        conditioning: collect(&spec.conditioning)?,
        outcome: to_node(&spec.outcome)?,
        anchor,
    })
}

fn rel(g: &UnrolledGraph, anchor: usize, n: NodeId) -> RelNode {
    RelNode {
        component: g.components()[n.comp].name.clone(),
        offset: n.t as i64 - anchor as i64,
    }
}

fn verdict_at(
    g: &RolledTimeGraph,
    spec: &EstimatorSpec,
    window: usize,
) -> Result<CivVerdict, GraphError> {
    let unrolled = g.unroll(window)?;
    let marg = unrolled.marginalize_to_observed()?;
    let q = anchor_query(g, spec, window)?;

    let outcome_set: NodeSet = [q.outcome].into_iter().collect();

    // Criterion 2: no conditioning node may be the outcome or descend from it.
    let mut forbidden = marg.descendants(&outcome_set)?;
    forbidden.insert(q.outcome);
    let civ2_violator = q.conditioning.iter().find(|n| forbidden.contains(n)).copied();

    // Criterion 1: separation in the graph with X -> Y edges removed.
    let cut = marg.remove_direct_edges(&q.regressors, q.outcome)?;
    let civ1 = d_separated(&cut, &q.instruments, &outcome_set, &q.conditioning)?;
    let witness = if civ1 {
        None
    } else {
        witness_path(&cut, &q.instruments, &outcome_set, &q.conditioning)?.map(|w| RelPath {
            nodes: w.nodes.iter().map(|&n| rel(&marg, q.anchor, n)).collect(),
            steps: w.steps,
        })
    };

    Ok(CivVerdict {
        civ1,
        civ2: civ2_violator.is_none(),
        witness_path: witness,
        witness_descendant: civ2_violator.map(|n| rel(&marg, q.anchor, n)),
        window,
    })
}

/// Decide the graphical criteria for `spec` on the rolled graph `g`.
///
/// The verdict is computed on the policy window and re-checked on a window
/// larger by `max_lag + 1`; disagreement raises an error instead of returning
/// an unstable answer.
pub fn check_civ_graphical(
    g: &RolledTimeGraph,
    spec: &EstimatorSpec,
    policy: WindowPolicy,
) -> Result<CivVerdict, GraphError> {
    let qmax = spec.max_lag() as usize;
    let gmax = g.max_lag() as usize;
    let base = match policy {
        WindowPolicy::Auto => 3 * (qmax + gmax) + 3,
        WindowPolicy::Fixed(w) => w,
    };
    let verdict = verdict_at(g, spec, base)?;
    let larger = base + gmax + 1;
    let recheck = verdict_at(g, spec, larger)?;
    if verdict.civ1 != recheck.civ1 || verdict.civ2 != recheck.civ2 {
        return Err(GraphError::UnstableVerdict { smaller: base, larger });
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::catalogue;
    use crate::graph::builtins::{builtin_graph, BuiltinModel};

    fn verdict(model: BuiltinModel, label: &str, l: u32) -> CivVerdict {
        let g = builtin_graph(model);
        let spec = catalogue(label, l).unwrap();
        check_civ_graphical(&g, &spec, WindowPolicy::Auto).unwrap()
    }

    #[test]
    fn naive_iv_invalid_on_inertial_demand() {
        let v = verdict(BuiltinModel::Model1, "#1", 0);
        assert!(!v.civ1);
        assert!(v.civ2);
        let path = v.witness_path.unwrap().render();
        assert_eq!(path, "W@0 <- W@-1 -> P@-1 -> D@-1 -> D@0");
        assert!(v.witness_descendant.is_none());
    }

    #[test]
    fn naive_iv_valid_on_heterogeneous_demand() {
        let v = verdict(BuiltinModel::Model2, "#1", 0);
        assert!(v.valid());
        assert!(v.witness_path.is_none());
    }

    #[test]
    fn lagged_demand_conditioning_fails_on_model2() {
        // Conditioning on past demand opens a collider: the unblocked path
        // runs through the latent inertial component.
        let v = verdict(BuiltinModel::Model2, "#3", 0);
        assert!(!v.civ1);
        assert!(v.witness_path.is_some());
    }

    #[test]
    fn full_nuisance_estimator_valid_everywhere() {
        for model in [BuiltinModel::Model1, BuiltinModel::Model2, BuiltinModel::Model3] {
            let v = verdict(model, "#8", 2);
            assert!(v.valid(), "#8 should be valid on {model:?}");
        }
    }

    #[test]
    fn special_cases_make_naive_iv_valid() {
        for model in [
            BuiltinModel::IidInstrument,
            BuiltinModel::NoDemandAutocorrelation,
            BuiltinModel::UnresponsiveDemand,
        ] {
            let v = verdict(model, "#1", 0);
            assert!(v.valid(), "#1 should be valid on {model:?}");
        }
    }

    #[test]
    fn civ2_flags_outcome_descendant_in_conditioning() {
        // A custom spec that conditions on the outcome's child.
        let g = builtin_graph(BuiltinModel::Model1);
        let spec = EstimatorSpec::new(
            "custom",
            vec![LaggedRef::new("W", 1)],
            vec![LaggedRef::new("P", 1)],
            vec![LaggedRef::new("D", 0)],
            LaggedRef::new("D", 1),
        )
        .unwrap();
        let v = check_civ_graphical(&g, &spec, WindowPolicy::Auto).unwrap();
        assert!(!v.civ2);
        let w = v.witness_descendant.unwrap();
        assert_eq!(w.component, "D");
    }

    #[test]
    fn latent_reference_rejected() {
        let g = builtin_graph(BuiltinModel::Model2);
        let spec = EstimatorSpec::new(
            "bad",
            vec![LaggedRef::new("W", 0)],
            vec![LaggedRef::new("P", 0)],
            vec![LaggedRef::new("B", 1)],
            LaggedRef::new("D", 0),
        )
        .unwrap();
        assert!(matches!(
            check_civ_graphical(&g, &spec, WindowPolicy::Auto),
            Err(GraphError::LatentReference(_))
        ));
    }

    #[test]
    fn unknown_component_rejected() {
        let g = builtin_graph(BuiltinModel::Model1);
        let spec = EstimatorSpec::new(
            "bad",
            vec![LaggedRef::new("Z", 0)],
            vec![LaggedRef::new("P", 0)],
            vec![],
            LaggedRef::new("D", 0),
        )
        .unwrap();
        assert!(matches!(
            check_civ_graphical(&g, &spec, WindowPolicy::Auto),
            Err(GraphError::UnknownComponent(_))
        ));
    }

    use crate::estimation::{EstimatorSpec, LaggedRef};
}
