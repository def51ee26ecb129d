//! Shared test support: an independent brute-force d-separation oracle and
//! random graph/query generation.
//!
//! The oracle enumerates every simple path between the query sets and
//! applies the blocking definition path by path. It shares no code with the
//! library's reachability-based decision procedure.

#![allow(dead_code)]

use civts::graph::{Component, NodeId, NodeSet, UnrolledGraph};
use rand::Rng;

/// One path step: the node stepped onto and whether the connecting edge has
/// an arrowhead at the previous node and at this node.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub node: NodeId,
    pub head_at_prev: bool,
    pub head_at_node: bool,
}

fn neighbors(g: &UnrolledGraph, v: NodeId) -> Vec<Step> {
    let mut out = Vec::new();
    for c in g.children_of(v) {
        out.push(Step { node: c, head_at_prev: false, head_at_node: true });
    }
    for p in g.parents_of(v) {
        out.push(Step { node: p, head_at_prev: true, head_at_node: false });
    }
    for s in g.spouses_of(v) {
        out.push(Step { node: s, head_at_prev: true, head_at_node: true });
    }
    out
}

/// Descendants (strict) of a node via a fresh forward search.
fn descendants_of(g: &UnrolledGraph, v: NodeId) -> NodeSet {
    let set: NodeSet = [v].into_iter().collect();
    g.descendants(&set).expect("node in graph")
}

/// Apply the blocking definition to one explicit path.
fn path_blocked(g: &UnrolledGraph, start: NodeId, steps: &[Step], s: &NodeSet) -> bool {
    // Intermediate vertices are steps[0..len-1].node; marks around
    // steps[k].node are steps[k].head_at_node (incoming) and
    // steps[k+1].head_at_prev (outgoing).
    let _ = start;
    for k in 0..steps.len().saturating_sub(1) {
        let v = steps[k].node;
        let collider = steps[k].head_at_node && steps[k + 1].head_at_prev;
        if collider {
            let mut open = s.contains(&v);
            if !open {
                let de = descendants_of(g, v);
                open = de.iter().any(|d| s.contains(d));
            }
            if !open {
                return true;
            }
        } else if s.contains(&v) {
            return true;
        }
    }
    false
}

/// Brute-force d-separation: enumerate all simple paths from `a` to `b` and
/// report separation iff every one is blocked by `s`. Returns `None` when
/// the enumeration budget is exceeded.
pub fn d_separated_bruteforce(
    g: &UnrolledGraph,
    a: &NodeSet,
    b: &NodeSet,
    s: &NodeSet,
    budget: usize,
) -> Option<bool> {
    let mut work = 0usize;
    for &start in a {
        let mut stack: Vec<(Vec<Step>, Vec<NodeId>)> = vec![(Vec::new(), vec![start])];
        while let Some((steps, visited)) = stack.pop() {
            work += 1;
            if work > budget {
                return None;
            }
            let at = *visited.last().unwrap();
            for step in neighbors(g, at) {
                if visited.contains(&step.node) {
                    continue;
                }
                let mut next_steps = steps.clone();
                next_steps.push(step);
                if b.contains(&step.node) {
                    // A complete path; blocking is judged on the whole path.
                    if !path_blocked(g, start, &next_steps, s) {
                        return Some(false);
                    }
                    continue;
                }
                let mut next_visited = visited.clone();
                next_visited.push(step.node);
                if next_steps.len() < g.num_active_nodes() {
                    stack.push((next_steps, next_visited));
                }
            }
        }
    }
    Some(true)
}

/// A random acyclic graph with bidirected edges over `comps x window` nodes.
pub fn random_graph(rng: &mut impl Rng, comps: usize, window: usize) -> UnrolledGraph {
    let components: Vec<Component> = (0..comps)
        .map(|i| Component::observed(&format!("C{i}")))
        .collect();
    let nodes: Vec<NodeId> = (0..window)
        .flat_map(|t| (0..comps).map(move |c| NodeId::new(t, c)))
        .collect();
    // Random topological order keeps the directed part acyclic.
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if rng.random_bool(0.22) {
                let (lo, hi) = if order[i] < order[j] { (i, j) } else { (j, i) };
                directed.push((nodes[lo], nodes[hi]));
            }
            if rng.random_bool(0.08) {
                bidirected.push((nodes[i], nodes[j]));
            }
        }
    }
    UnrolledGraph::from_edges(components, window, &directed, &bidirected)
}

/// Three random disjoint node sets (a and b non-empty).
pub fn random_query(
    rng: &mut impl Rng,
    g: &UnrolledGraph,
) -> Option<(NodeSet, NodeSet, NodeSet)> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    if nodes.len() < 3 {
        return None;
    }
    let mut shuffled = nodes;
    for i in (1..shuffled.len()).rev() {
        let j = rng.random_range(0..=i);
        shuffled.swap(i, j);
    }
    let na = 1 + rng.random_range(0..2usize);
    let nb = 1 + rng.random_range(0..2usize);
    let ns = rng.random_range(0..=3usize);
    if na + nb + ns > shuffled.len() {
        return None;
    }
    let a: NodeSet = shuffled[..na].iter().copied().collect();
    let b: NodeSet = shuffled[na..na + nb].iter().copied().collect();
    let s: NodeSet = shuffled[na + nb..na + nb + ns].iter().copied().collect();
    Some((a, b, s))
}
