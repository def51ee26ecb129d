//! Finite-window instantiation of a rolled time graph.

use super::{Component, EdgeKind, GraphError, NodeId, RolledTimeGraph};
use std::collections::BTreeSet;

/// A set of unrolled-graph nodes. Ordered so that iteration (and therefore
/// every derived output) is deterministic.
pub type NodeSet = BTreeSet<NodeId>;

/// A finite graph over `(t, component)` nodes with directed and bidirected
/// edges. Node identities are stable under marginalization: dropped nodes
/// simply become inactive.
#[derive(Debug, Clone)]
pub struct UnrolledGraph {
    components: Vec<Component>,
    window: usize,
    active: Vec<bool>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    spouses: Vec<Vec<usize>>,
}

impl UnrolledGraph {
    pub(super) fn from_rolled(g: &RolledTimeGraph, window: usize) -> Self {
        let ncomp = g.components().len();
        let n = window * ncomp;
        let mut out = Self {
            components: g.components().to_vec(),
            window,
            active: vec![true; n],
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            spouses: vec![Vec::new(); n],
        };
        for e in g.edges() {
            let (src_comp, lag) = e.source;
            let lag = lag as usize;
            for t in lag..window {
                let s = out.idx(NodeId::new(t - lag, src_comp));
                let d = out.idx(NodeId::new(t, e.target));
                match e.kind {
                    EdgeKind::Directed => {
                        out.children[s].push(d);
                        out.parents[d].push(s);
                    }
                    EdgeKind::Bidirected => {
                        if s != d {
                            out.spouses[s].push(d);
                            out.spouses[d].push(s);
                        }
                    }
                }
            }
        }
        out.normalize();
        out
    }

    /// Build an unrolled graph directly from explicit node and edge lists.
    /// Useful for tests and for randomized d-separation checks.
    pub fn from_edges(
        components: Vec<Component>,
        window: usize,
        directed: &[(NodeId, NodeId)],
        bidirected: &[(NodeId, NodeId)],
    ) -> Self {
        let n = window * components.len();
        let mut out = Self {
            components,
            window,
            active: vec![true; n],
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            spouses: vec![Vec::new(); n],
        };
        for &(a, b) in directed {
            let (s, d) = (out.idx(a), out.idx(b));
            out.children[s].push(d);
            out.parents[d].push(s);
        }
        for &(a, b) in bidirected {
            let (s, d) = (out.idx(a), out.idx(b));
            if s != d {
                out.spouses[s].push(d);
                out.spouses[d].push(s);
            }
        }
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        for list in self
            .parents
            .iter_mut()
            .chain(self.children.iter_mut())
            .chain(self.spouses.iter_mut())
        {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub(super) fn idx(&self, node: NodeId) -> usize {
        node.t * self.components.len() + node.comp
    }

    pub(super) fn node(&self, idx: usize) -> NodeId {
        NodeId::new(idx / self.components.len(), idx % self.components.len())
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_index(&self, name: &str) -> Result<usize, GraphError> {
        self.components
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| GraphError::UnknownComponent(name.to_string()))
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.t < self.window && node.comp < self.components.len() && self.active[self.idx(node)]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.active.len()).filter(|&i| self.active[i]).map(|i| self.node(i))
    }

    pub fn num_active_nodes(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn parents_of(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.parents[self.idx(node)].iter().map(|&i| self.node(i))
    }

    pub fn children_of(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children[self.idx(node)].iter().map(|&i| self.node(i))
    }

    pub fn spouses_of(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.spouses[self.idx(node)].iter().map(|&i| self.node(i))
    }

    pub fn directed_edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (i, ch) in self.children.iter().enumerate() {
            if !self.active[i] {
                continue;
            }
            for &c in ch {
                out.push((self.node(i), self.node(c)));
            }
        }
        out
    }

    pub fn bidirected_edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (i, sp) in self.spouses.iter().enumerate() {
            if !self.active[i] {
                continue;
            }
            for &s in sp {
                if i < s {
                    out.push((self.node(i), self.node(s)));
                }
            }
        }
        out
    }

    pub(super) fn validate_nodes(&self, s: &NodeSet) -> Result<(), GraphError> {
        for &n in s {
            if !self.contains(n) {
                return Err(GraphError::NodeOutsideWindow(self.render_node(n)));
            }
        }
        Ok(())
    }

    pub fn render_node(&self, n: NodeId) -> String {
        let name = self
            .components
            .get(n.comp)
            .map(|c| c.name.as_str())
            .unwrap_or("?");
        format!("{}@t{}", name, n.t)
    }

    /// All nodes reachable from `s` via directed edges, excluding `s` itself.
    pub fn descendants(&self, s: &NodeSet) -> Result<NodeSet, GraphError> {
        self.validate_nodes(s)?;
        let mut seen = vec![false; self.active.len()];
        let mut stack: Vec<usize> = s.iter().map(|&n| self.idx(n)).collect();
        let mut out = NodeSet::new();
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                    out.insert(self.node(c));
                }
            }
        }
        for n in s {
            out.remove(n);
        }
        Ok(out)
    }

    /// The graph with all directed edges from nodes of `x` into `y` removed.
    /// Bidirected edges are untouched.
    pub fn remove_direct_edges(&self, x: &NodeSet, y: NodeId) -> Result<Self, GraphError> {
        self.validate_nodes(x)?;
        if !self.contains(y) {
            return Err(GraphError::NodeOutsideWindow(self.render_node(y)));
        }
        let mut out = self.clone();
        let yi = out.idx(y);
        let removed: Vec<usize> = x.iter().map(|&n| out.idx(n)).collect();
        out.parents[yi].retain(|p| !removed.contains(p));
        for &s in &removed {
            out.children[s].retain(|&c| c != yi);
        }
        Ok(out)
    }

    /// Drop a node and all incident edges (used by marginalization).
    pub(super) fn deactivate(&mut self, idx: usize) {
        self.active[idx] = false;
        for &p in &self.parents[idx].clone() {
            self.children[p].retain(|&c| c != idx);
        }
        for &c in &self.children[idx].clone() {
            self.parents[c].retain(|&p| p != idx);
        }
        for &s in &self.spouses[idx].clone() {
            self.spouses[s].retain(|&x| x != idx);
        }
        self.parents[idx].clear();
        self.children[idx].clear();
        self.spouses[idx].clear();
    }

    pub(super) fn add_directed_idx(&mut self, s: usize, d: usize) {
        if !self.children[s].contains(&d) {
            self.children[s].push(d);
            self.parents[d].push(s);
        }
    }

    pub(super) fn add_bidirected_idx(&mut self, a: usize, b: usize) {
        if a != b && !self.spouses[a].contains(&b) {
            self.spouses[a].push(b);
            self.spouses[b].push(a);
        }
    }

    pub(super) fn renormalize(&mut self) {
        self.normalize();
    }
}
