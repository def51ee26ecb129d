//! Causal time graphs: rolled (stationary template) and unrolled (finite window)
//! representations with directed and bidirected edges, latent projection,
//! d-separation, and the graphical validity criteria for conditional IV
//! estimators.

mod builtins;
mod civ;
mod dsep;
mod marginalize;
mod text;
mod unrolled;

pub use builtins::{builtin_graph, builtin_graphs, BuiltinModel};
pub use civ::{check_civ_graphical, CivVerdict, WindowPolicy};
pub use dsep::{d_separated, witness_path, PathStep, Witness};
pub use text::{parse_node_ref, parse_rolled_graph, render_rolled_graph};
pub use unrolled::{NodeSet, UnrolledGraph};

use std::collections::HashMap;
use thiserror::Error;

/// Errors for graph construction and queries.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate component name `{0}`")]
    DuplicateComponent(String),
    #[error("graph must declare at least one observed component")]
    NoObservedComponent,
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("lag-0 directed edges form an instantaneous cycle through `{0}`")]
    InstantaneousCycle(String),
    #[error("window of length {got} too small: need at least max_lag + 1 = {required}")]
    WindowTooSmall { required: usize, got: usize },
    #[error("node {0} lies outside the unrolled window")]
    NodeOutsideWindow(String),
    #[error("query sets must be mutually disjoint (node {0} appears in two sets)")]
    OverlappingSets(String),
    #[error("estimator spec references latent component `{0}`")]
    LatentReference(String),
    #[error("`keep` set contains node {0} which is not in the graph")]
    KeepOutsideGraph(String),
    #[error(
        "verdict did not stabilize: windows {smaller} and {larger} disagree; \
         widen the window policy"
    )]
    UnstableVerdict { smaller: usize, larger: usize },
    #[error("graph text parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A named time-series component (process) of a causal time graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub observed: bool,
}

impl Component {
    pub fn observed(name: &str) -> Self {
        Self { name: name.to_string(), observed: true }
    }

    pub fn latent(name: &str) -> Self {
        Self { name: name.to_string(), observed: false }
    }
}

/// Edge kind in a marginalized time graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Directed,
    Bidirected,
}

/// A stationary edge template.
///
/// Directed: `(source at t - lag) -> (target at t)` for every t.
/// Bidirected: `(source at t - lag) <-> (target at t)` for every t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RolledEdge {
    pub kind: EdgeKind,
    /// Source component index and its lag relative to the target.
    pub source: (usize, u32),
    /// Target component index, implicitly at lag 0.
    pub target: usize,
}

/// A stationary causal time graph: a finite edge template that unrolls to a
/// finite-window graph over (time, component) nodes.
#[derive(Debug, Clone)]
pub struct RolledTimeGraph {
    components: Vec<Component>,
    index: HashMap<String, usize>,
    edges: Vec<RolledEdge>,
    max_lag: u32,
}

impl RolledTimeGraph {
    pub fn new(components: Vec<Component>) -> Result<Self, GraphError> {
        let mut index = HashMap::new();
        for (i, c) in components.iter().enumerate() {
            if index.insert(c.name.clone(), i).is_some() {
                return Err(GraphError::DuplicateComponent(c.name.clone()));
            }
        }
        if !components.iter().any(|c| c.observed) {
            return Err(GraphError::NoObservedComponent);
        }
        Ok(Self { components, index, edges: Vec::new(), max_lag: 0 })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn edges(&self) -> &[RolledEdge] {
        &self.edges
    }

    pub fn max_lag(&self) -> u32 {
        self.max_lag
    }

    pub fn component_index(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownComponent(name.to_string()))
    }

    pub fn component_name(&self, idx: usize) -> &str {
        &self.components[idx].name
    }

    /// Add `source[-lag] -> target`.
    pub fn add_directed(&mut self, source: &str, lag: u32, target: &str) -> Result<(), GraphError> {
        let s = self.component_index(source)?;
        let t = self.component_index(target)?;
        let edge = RolledEdge { kind: EdgeKind::Directed, source: (s, lag), target: t };
        if !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
        self.max_lag = self.max_lag.max(lag);
        self.check_instantaneous_acyclic()?;
        Ok(())
    }

    /// Add `a[-lag] <-> b`.
    pub fn add_bidirected(&mut self, a: &str, lag: u32, b: &str) -> Result<(), GraphError> {
        let s = self.component_index(a)?;
        let t = self.component_index(b)?;
        let edge = RolledEdge { kind: EdgeKind::Bidirected, source: (s, lag), target: t };
        // a <-> b at lag 0 equals b <-> a at lag 0.
        let mirror = RolledEdge { kind: EdgeKind::Bidirected, source: (t, lag), target: s };
        if !self.edges.contains(&edge) && !(lag == 0 && self.edges.contains(&mirror)) {
            self.edges.push(edge);
        }
        self.max_lag = self.max_lag.max(lag);
        Ok(())
    }

    /// The lag-0 directed part must be acyclic, otherwise unrolling would
    /// produce a cyclic graph.
    fn check_instantaneous_acyclic(&self) -> Result<(), GraphError> {
        let n = self.components.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            if e.kind == EdgeKind::Directed && e.source.1 == 0 {
                adj[e.source.0].push(e.target);
            }
        }
        // Kahn's algorithm; leftover nodes mean a cycle.
        let mut indeg = vec![0usize; n];
        for out in &adj {
            for &t in out {
                indeg[t] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &t in &adj[v] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        if seen < n {
            let bad = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(GraphError::InstantaneousCycle(self.components[bad].name.clone()));
        }
        Ok(())
    }

    /// Instantiate the template over the window `[0, window_length)`.
    ///
    /// Every node is `(t, component)` for `t` in the window; every edge is a
    /// shifted copy of a rolled edge that lies fully inside the window.
    pub fn unroll(&self, window_length: usize) -> Result<UnrolledGraph, GraphError> {
        let required = self.max_lag as usize + 1;
        if window_length < required {
            return Err(GraphError::WindowTooSmall { required, got: window_length });
        }
        Ok(UnrolledGraph::from_rolled(self, window_length))
    }
}

/// A node of an unrolled graph: component `comp` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub t: usize,
    pub comp: usize,
}

impl NodeId {
    pub fn new(t: usize, comp: usize) -> Self {
        Self { t, comp }
    }
}
